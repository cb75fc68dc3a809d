#pragma once

// groupkb command line: ingest, validate, enrich, suggest, query,
// techniques, layer. Exit codes: 0 ok, 1 user error, 2 internal error.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace groupkb::cli {

// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

struct Outcome {
    int exit_code = 0;
    std::string out;
    std::string err;
};

Outcome run(const std::vector<std::string>& args, const std::optional<std::string>& stdin_text = std::nullopt);

}  // namespace groupkb::cli
