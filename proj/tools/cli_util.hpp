#pragma once

#include <iostream>
#include <string>

#include "rtva/config.hpp"
#include "rtva/errors.hpp"

namespace rtva::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;      // bad flags or config
inline constexpr int kExitTransport = 3;  // environment/transport failure

// Finds --config <path> (or --config=<path>) ahead of full flag parsing so
// file values can seed the option defaults (precedence: defaults < file <
// flags).
inline std::string find_config_arg(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) return argv[i + 1];
        if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
    }
    return "";
}

// Every run logs its effective configuration so it can be reproduced.
inline void echo_config(const std::string& component, const cfg::KeyValues& kv) {
    std::cerr << "# " << component << " effective config\n";
    for (const auto& [key, value] : kv) {
        std::cerr << "# " << key << " = " << value << "\n";
    }
}

}  // namespace rtva::cli
