#pragma once

#include <map>
#include <optional>
#include <string>

namespace rtva::cfg {

// Flat "key = value" config text, one key per line, # comments. Keys use
// dotted section prefixes (codec.bitrate, eoq.silence-ms). A leading
// component prefix ("client." or "server.") lets one file configure both
// binaries; strip_prefix() selects the relevant subset.
using KeyValues = std::map<std::string, std::string>;

KeyValues load_key_values(const std::string& path);

// Returns entries under "prefix." (with the prefix removed) merged over the
// unprefixed entries, so shared keys stay available to both components.
KeyValues strip_prefix(const KeyValues& kv, const std::string& prefix);

// Overlay: values in `over` win.
KeyValues merge(KeyValues base, const KeyValues& over);

// Typed accessors; ParamError when a present value does not parse.
std::optional<std::string> get_string(const KeyValues& kv, const std::string& key);
std::optional<int> get_int(const KeyValues& kv, const std::string& key);
std::optional<double> get_double(const KeyValues& kv, const std::string& key);
std::optional<bool> get_bool(const KeyValues& kv, const std::string& key);  // true/false/1/0/on/off

}  // namespace rtva::cfg
