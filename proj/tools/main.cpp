#include "ibsbt/cli.h"

int main(int argc, char** argv) {
    return ibsbt::run_cli(argc, argv);
}
