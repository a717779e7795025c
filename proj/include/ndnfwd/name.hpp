#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ndnfwd {

// Hierarchical content names, written "/component/component/...".
// The empty name "/" has zero components and is a prefix of everything.
namespace name {

inline std::vector<std::string_view> components(std::string_view name) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos < name.size()) {
        if (name[pos] == '/') {
            ++pos;
            continue;
        }
        std::size_t end = name.find('/', pos);
        if (end == std::string_view::npos)
            end = name.size();
        out.push_back(name.substr(pos, end - pos));
        pos = end;
    }
    return out;
}

inline std::string_view first_component(std::string_view name) {
    auto comps = components(name);
    return comps.empty() ? std::string_view{} : comps.front();
}

// True when every component of `prefix` matches the leading components of
// `name` in order.
inline bool is_prefix_of(std::string_view prefix, std::string_view name) {
    auto p = components(prefix);
    auto n = components(name);
    if (p.size() > n.size())
        return false;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] != n[i])
            return false;
    return true;
}

inline std::size_t component_count(std::string_view name) {
    return components(name).size();
}

} // namespace name
} // namespace ndnfwd
