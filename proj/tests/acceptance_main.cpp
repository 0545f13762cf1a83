// Acceptance suite: runs every verification check at full scale and prints
// one pass/fail line per check. Exits nonzero if any check fails.
#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "netlearn/verify.hpp"

int main(int argc, char** argv) {
    netlearn::VerifyOptions opt;
    opt.scratch_dir = "acceptance_scratch";
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--quick") == 0) opt.quick = true;
        if (std::strcmp(argv[i], "--threads") == 0 && i + 1 < argc)
            opt.threads = static_cast<unsigned>(std::strtoul(argv[i + 1], nullptr, 10));
    }
    std::printf("netlearn acceptance suite (%s)\n", opt.quick ? "quick" : "full scale");
    const auto results = netlearn::run_verification(opt);
    return netlearn::print_verification(results, stdout);
}
