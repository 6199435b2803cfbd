#include "tweetprobe/cli.h"

int main(int argc, char** argv) { return tweetprobe::run_cli(argc, argv); }
