#include "rtva/config.hpp"

#include <fstream>

#include "rtva/errors.hpp"

namespace rtva::cfg {

namespace {

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) ++a;
    while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
    return s.substr(a, b - a);
}

}  // namespace

KeyValues load_key_values(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    KeyValues kv;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ParamError("config line " + std::to_string(lineno) +
                             ": expected key = value");
        }
        const std::string key = trim(t.substr(0, eq));
        if (key.empty()) {
            throw ParamError("config line " + std::to_string(lineno) + ": empty key");
        }
        kv[key] = trim(t.substr(eq + 1));
    }
    return kv;
}

KeyValues strip_prefix(const KeyValues& kv, const std::string& prefix) {
    const std::string dotted = prefix + ".";
    KeyValues out;
    for (const auto& [key, value] : kv) {
        if (key.rfind(dotted, 0) == 0) continue;  // handled in the second pass
        // Keys for the other component are dropped; everything else is shared.
        if (key.rfind("client.", 0) == 0 || key.rfind("server.", 0) == 0 ||
            key.rfind("eval.", 0) == 0) {
            continue;
        }
        out[key] = value;
    }
    for (const auto& [key, value] : kv) {
        if (key.rfind(dotted, 0) == 0) out[key.substr(dotted.size())] = value;
    }
    return out;
}

KeyValues merge(KeyValues base, const KeyValues& over) {
    for (const auto& [key, value] : over) base[key] = value;
    return base;
}

std::optional<std::string> get_string(const KeyValues& kv, const std::string& key) {
    const auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    return it->second;
}

std::optional<int> get_int(const KeyValues& kv, const std::string& key) {
    const auto s = get_string(kv, key);
    if (!s) return std::nullopt;
    try {
        size_t used = 0;
        const int v = std::stoi(*s, &used);
        if (used != s->size()) throw std::invalid_argument(*s);
        return v;
    } catch (const std::exception&) {
        throw ParamError("config: " + key + " must be an integer, got '" + *s + "'");
    }
}

std::optional<double> get_double(const KeyValues& kv, const std::string& key) {
    const auto s = get_string(kv, key);
    if (!s) return std::nullopt;
    try {
        size_t used = 0;
        const double v = std::stod(*s, &used);
        if (used != s->size()) throw std::invalid_argument(*s);
        return v;
    } catch (const std::exception&) {
        throw ParamError("config: " + key + " must be a number, got '" + *s + "'");
    }
}

std::optional<bool> get_bool(const KeyValues& kv, const std::string& key) {
    const auto s = get_string(kv, key);
    if (!s) return std::nullopt;
    if (*s == "true" || *s == "1" || *s == "on" || *s == "yes") return true;
    if (*s == "false" || *s == "0" || *s == "off" || *s == "no") return false;
    throw ParamError("config: " + key + " must be a boolean, got '" + *s + "'");
}

}  // namespace rtva::cfg
