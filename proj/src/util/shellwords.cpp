#include "firecrest/util/shellwords.hpp"

namespace firecrest::shellwords {

std::string quote(const std::string& arg) {
    bool needs_quotes = arg.empty();
    for (char c : arg) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '"' || c == '\\') {
            needs_quotes = true;
            break;
        }
    }
    if (!needs_quotes) return arg;
    std::string out = "\"";
    for (char c : arg) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string join(const std::vector<std::string>& args) {
    std::string out;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) out.push_back(' ');
        out += quote(args[i]);
    }
    return out;
}

std::optional<std::vector<std::string>> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool in_arg = false;
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (in_quotes) {
            if (c == '\\' && i + 1 < line.size() &&
                (line[i + 1] == '"' || line[i + 1] == '\\')) {
                cur.push_back(line[++i]);
            } else if (c == '"') {
                in_quotes = false;
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            in_quotes = true;
            in_arg = true;
        } else if (c == ' ' || c == '\t' || c == '\n') {
            if (in_arg) {
                out.push_back(cur);
                cur.clear();
                in_arg = false;
            }
        } else {
            cur.push_back(c);
            in_arg = true;
        }
    }
    if (in_quotes) return std::nullopt;
    if (in_arg) out.push_back(cur);
    return out;
}

}  // namespace firecrest::shellwords
