#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace firecrest::scheduler {

// Parsed form of an sbatch-format job script: "#SBATCH --key=value" directive
// lines followed by the command body.
struct ParsedScript {
    std::string job_name;                 // empty -> caller supplies default
    std::optional<std::int64_t> wall_time_seconds;  // from --time=HH:MM:SS
    std::optional<std::string> output_path;         // from --output=
    std::string body;                     // command lines, directives stripped
    std::optional<int> body_exit_code;    // trailing "exit N" convention
    std::vector<std::string> warnings;    // ignored directives
};

struct ParseError {
    std::string message;
};

// Returns the parsed script or a parse error mirroring sbatch's stderr habit.
std::optional<ParsedScript> parse_sbatch_script(const std::string& text, ParseError& error);

}  // namespace firecrest::scheduler
