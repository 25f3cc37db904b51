#include "qpcalc/cli.hpp"

int main(int argc, char** argv) {
    return qpcalc::run_cli(argc, argv);
}
