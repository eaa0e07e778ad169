#include "doctest.h"

#include <fstream>

#include "rtva/config.hpp"
#include "rtva/errors.hpp"

using namespace rtva;

namespace {

std::string write_cfg(const std::string& body) {
    const std::string path = "config_test.cfg";
    std::ofstream f(path);
    f << body;
    return path;
}

}  // namespace

TEST_CASE("key = value parsing with comments and prefixes") {
    auto path = write_cfg(
        "# shared\n"
        "codec.bitrate = 24000\n"
        "client.codec.name = opus\n"
        "server.eoq.silence-ms = 1200\n"
        "client.drc.ratio = 2.0\n");
    auto kv = cfg::load_key_values(path);
    std::remove(path.c_str());

    auto client = cfg::strip_prefix(kv, "client");
    CHECK(cfg::get_int(client, "codec.bitrate") == 24000);
    CHECK(cfg::get_string(client, "codec.name") == "opus");
    CHECK(cfg::get_double(client, "drc.ratio") == 2.0);
    CHECK_FALSE(cfg::get_string(client, "eoq.silence-ms").has_value());

    auto server = cfg::strip_prefix(kv, "server");
    CHECK(cfg::get_int(server, "eoq.silence-ms") == 1200);
    CHECK(cfg::get_int(server, "codec.bitrate") == 24000);  // shared key
    CHECK_FALSE(cfg::get_string(server, "codec.name").has_value());
}

TEST_CASE("merge precedence: overlay wins") {
    cfg::KeyValues base{{"a", "1"}, {"b", "2"}};
    cfg::KeyValues over{{"b", "3"}};
    auto merged = cfg::merge(base, over);
    CHECK(cfg::get_int(merged, "a") == 1);
    CHECK(cfg::get_int(merged, "b") == 3);
}

TEST_CASE("typed accessors reject malformed values") {
    cfg::KeyValues kv{{"n", "abc"}, {"f", "1.5x"}, {"b", "maybe"}, {"ok", "on"}};
    CHECK_THROWS_AS(cfg::get_int(kv, "n"), ParamError);
    CHECK_THROWS_AS(cfg::get_double(kv, "f"), ParamError);
    CHECK_THROWS_AS(cfg::get_bool(kv, "b"), ParamError);
    CHECK(cfg::get_bool(kv, "ok") == true);
    CHECK_FALSE(cfg::get_int(kv, "missing").has_value());
}

TEST_CASE("malformed lines raise") {
    auto path = write_cfg("this line has no equals\n");
    CHECK_THROWS_AS(cfg::load_key_values(path), ParamError);
    std::remove(path.c_str());
    CHECK_THROWS_AS(cfg::load_key_values("missing.cfg"), IoError);
}
