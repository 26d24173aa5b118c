#include "firecrest/scheduler/sbatch_script.hpp"

#include <regex>
#include <sstream>

namespace firecrest::scheduler {

namespace {

std::optional<std::int64_t> parse_walltime(const std::string& value) {
    static const std::regex pattern(R"(^(\d{1,2}):(\d{2}):(\d{2})$)");
    std::smatch m;
    if (!std::regex_match(value, m, pattern)) return std::nullopt;
    std::int64_t h = std::stoll(m[1]);
    std::int64_t min = std::stoll(m[2]);
    std::int64_t s = std::stoll(m[3]);
    if (min > 59 || s > 59) return std::nullopt;
    return h * 3600 + min * 60 + s;
}

}  // namespace

std::optional<ParsedScript> parse_sbatch_script(const std::string& text, ParseError& error) {
    if (text.empty()) {
        error.message = "sbatch: error: script is empty";
        return std::nullopt;
    }
    ParsedScript out;
    std::istringstream in(text);
    std::string line;
    std::ostringstream body;
    static const std::regex directive(R"(^#SBATCH\s+(\S+)\s*(.*)$)");
    static const std::regex exit_line(R"(^\s*exit\s+(\d+)\s*$)");
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::smatch m;
        if (std::regex_match(line, m, directive)) {
            std::string opt = m[1];
            std::string rest = m[2];
            auto eq = opt.find('=');
            std::string key = eq == std::string::npos ? opt : opt.substr(0, eq);
            std::string value = eq == std::string::npos ? rest : opt.substr(eq + 1);
            if (key.rfind("--", 0) != 0 || (eq == std::string::npos && value.empty())) {
                error.message = "sbatch: error: invalid directive: " + line;
                return std::nullopt;
            }
            if (key == "--job-name") {
                out.job_name = value;
            } else if (key == "--time") {
                auto secs = parse_walltime(value);
                if (!secs) {
                    error.message = "sbatch: error: invalid time limit specification: " + value;
                    return std::nullopt;
                }
                out.wall_time_seconds = *secs;
            } else if (key == "--output") {
                out.output_path = value;
            } else {
                out.warnings.push_back("ignored directive: " + key);
            }
            continue;
        }
        if (line.rfind("#!", 0) == 0) continue;
        if (!line.empty() && line[0] == '#') continue;
        if (std::regex_match(line, m, exit_line)) {
            out.body_exit_code = std::stoi(m[1]);
        }
        body << line << "\n";
    }
    out.body = body.str();
    return out;
}

}  // namespace firecrest::scheduler
