#include <cstdio>

// command line front end; subcommands are wired up as the library lands
int main() {
    std::fprintf(stderr, "ssc: no subcommand given\n");
    return 2;
}
