#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace rkhs::cli {

enum ExitCode : int { kPass = 0, kUsage = 1, kVerdictFailure = 2 };

struct Settings {
    std::string family = "hardy";
    double s = 0.0;
    double sigma = 1.0;
    int d = 1;
    int N = -1;       // command default when negative
    double tol = -1;  // command default when negative
    std::uint64_t seed = 0x5eed;
    std::string out;
    std::string format = "json";
    nlohmann::json config = nlohmann::json::object();

    // pick
    std::string problem;
    bool sweep = false;
    int steps = 11;
    std::string numerator;
    std::string denominator;
    int points = 50;
    double radius = 0.9;

    // model
    std::string check;
    bool bergman_hereditary = false;
    std::string toeplitz;
    std::string order = "auto";

    // dilate / model
    std::string tuple;
    std::string tuple_family;
    std::string ideal;
    double scale = 1.0;
    bool zero = false;
};

struct Outcome {
    int code = kPass;
    nlohmann::json report;
    std::string csv;
};

Outcome cmd_kernel(const Settings& s);
Outcome cmd_pick(const Settings& s);
Outcome cmd_model(const Settings& s);
Outcome cmd_dilate(const Settings& s);
Outcome cmd_report(const Settings& s);

/// Flattens a JSON report into "key,value" rows with dotted/indexed keys.
std::string flatten_csv(const nlohmann::json& report);

/// Full front-end: parses args (without the program name), runs the command and
/// writes the report to out (or --out). Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace rkhs::cli
