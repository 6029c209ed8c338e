#pragma once
#include <map>
#include <string>
#include <vector>

namespace qdef::cli {

inline constexpr const char* kVersion = "1.0.0";

// exit codes
enum Exit { Ok = 0, ArgError = 2, VerifyFailure = 3, NumericFailure = 4 };

// runs one invocation; argv[0] is the program name, argv[1] the subcommand
int run(const std::vector<std::string>& args);

struct GridSpec {
    double start = 0, stop = 0, step = 0;
    std::vector<double> values() const;
};

// "start:stop:step"
GridSpec parse_grid(const std::string& text);

// %.17g, "nan" for NaN
std::string fmt(double x);

std::string sha256_file(const std::string& path);

// key=value lines, '#' comments, blank lines ignored
std::map<std::string, std::string> read_config(const std::string& path);

} // namespace qdef::cli
