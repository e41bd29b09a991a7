#include "subdiff/cli.hpp"

#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    subdiff::RunConfig cfg;
    try {
        cfg = subdiff::parse_config(args);
    } catch (const subdiff::HelpRequested& h) {
        std::cout << h.what();
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\nrun 'subdiff --help' for usage\n";
        return 2;
    }
    return subdiff::run(cfg, std::cout, std::cerr);
}
