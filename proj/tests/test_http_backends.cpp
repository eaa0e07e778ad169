#include "doctest.h"

#include <thread>

#include "httplib.h"
#include "rtva/backends.hpp"
#include "rtva/errors.hpp"

using namespace rtva;

namespace {

struct TestService {
    httplib::Server server;
    std::thread thread;
    int port = 0;

    TestService() {
        server.Post("/transcribe", [](const httplib::Request& req, httplib::Response& res) {
            res.set_content("heard " + std::to_string(req.body.size()) + " bytes",
                            "text/plain");
        });
        server.Post("/generate", [](const httplib::Request& req, httplib::Response& res) {
            res.set_content("reply to " + req.body + "|", "text/plain");
        });
        server.Post("/synthesize", [](const httplib::Request& req, httplib::Response& res) {
            std::string pcm(req.body.size() * 2, '\0');  // one sample per char
            res.set_content(pcm, "application/octet-stream");
        });
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }

    ~TestService() {
        server.stop();
        thread.join();
    }
};

}  // namespace

TEST_CASE("http adapters round trip against a local service") {
    TestService service;
    backends::HttpBackendConfig cfg{"127.0.0.1", service.port, 2000};

    auto asr = backends::http_asr(cfg);
    seg::SpeechSegment segment;
    segment.samples.assign(160, 5);
    CHECK(asr->transcribe(segment) == "heard 320 bytes");
    CHECK(asr->transcribe(seg::SpeechSegment{}) == "");  // no request for empty

    auto llm = backends::http_llm(cfg);
    std::string streamed;
    llm->generate("hi", [&](std::string_view c) { streamed += c; });
    CHECK(streamed == "reply to hi|");

    auto tts = backends::http_tts(cfg, 22050);
    CHECK(tts->native_rate_hz() == 22050);
    CHECK(tts->synthesize("abcd").size() == 4);
}

TEST_CASE("http adapters fail with IoError when the service is unreachable") {
    backends::HttpBackendConfig cfg{"127.0.0.1", 1, 200};  // nothing listens on port 1
    auto asr = backends::http_asr(cfg);
    seg::SpeechSegment segment;
    segment.samples.assign(10, 1);
    CHECK_THROWS_AS(asr->transcribe(segment), IoError);
}
