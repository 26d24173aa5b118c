#include "firecrest/http/router.hpp"

#include <algorithm>

namespace firecrest::http {

namespace {

bool is_param(const std::string& seg) { return seg.size() > 2 && seg.front() == '{' && seg.back() == '}'; }
bool is_tail(const std::string& seg) {
    return is_param(seg) && seg.size() > 5 && seg.compare(seg.size() - 4, 3, "...") == 0;
}
std::string param_name(const std::string& seg) {
    std::string name = seg.substr(1, seg.size() - 2);
    if (name.size() > 3 && name.compare(name.size() - 3, 3, "...") == 0)
        name.resize(name.size() - 3);
    return name;
}

// Literal segments outrank parameters so /storage/xfer-external/upload wins
// over /storage/xfer-external/{operation}.
int specificity(const std::string& pattern) {
    int score = 0;
    for (const auto& seg : split_path(pattern)) {
        score *= 3;
        if (!is_param(seg)) score += 2;
        else if (!is_tail(seg)) score += 1;
    }
    return score;
}

}  // namespace

std::vector<std::string> split_path(const std::string& path) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start < path.size()) {
        if (path[start] == '/') {
            ++start;
            continue;
        }
        auto end = path.find('/', start);
        if (end == std::string::npos) end = path.size();
        out.push_back(path.substr(start, end - start));
        start = end;
    }
    return out;
}

void Router::add(Route route) {
    routes_.push_back(std::move(route));
    std::stable_sort(routes_.begin(), routes_.end(), [](const Route& a, const Route& b) {
        return specificity(a.pattern) > specificity(b.pattern);
    });
}

bool Router::match_pattern(const std::string& pattern, const std::string& path,
                           std::map<std::string, std::string>& params) {
    auto pat = split_path(pattern);
    auto segs = split_path(path);
    std::size_t i = 0;
    for (; i < pat.size(); ++i) {
        if (is_tail(pat[i])) {
            if (i >= segs.size()) return false;  // tail must capture at least one segment
            std::string rest;
            for (std::size_t j = i; j < segs.size(); ++j) {
                if (j > i) rest += '/';
                rest += segs[j];
            }
            params[param_name(pat[i])] = rest;
            return true;
        }
        if (i >= segs.size()) return false;
        if (is_param(pat[i])) {
            params[param_name(pat[i])] = segs[i];
        } else if (pat[i] != segs[i]) {
            return false;
        }
    }
    return i == segs.size();
}

Router::Match Router::resolve(const std::string& method, const std::string& path) const {
    bool path_known = false;
    for (const auto& route : routes_) {
        std::map<std::string, std::string> params;
        if (!match_pattern(route.pattern, path, params)) continue;
        if (route.method == method) {
            Match m;
            m.outcome = Outcome::matched;
            m.route = &route;
            m.params = std::move(params);
            return m;
        }
        path_known = true;
    }
    Match m;
    m.outcome = path_known ? Outcome::method_not_allowed : Outcome::not_found;
    return m;
}

}  // namespace firecrest::http
