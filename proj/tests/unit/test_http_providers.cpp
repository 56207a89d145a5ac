#include <doctest.h>

#include <atomic>
#include <thread>

#include <httplib.h>

#include "support.hpp"
#include "tod/gateway.hpp"
#include "tod/http_providers.hpp"

using namespace tod;
using nlohmann::json;

namespace {

// Local server on an ephemeral port; handlers are installed before start().
class LocalServer {
public:
    httplib::Server server;

    void start() {
        port_ = server.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~LocalServer() {
        server.stop();
        if (thread_.joinable()) thread_.join();
    }
    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }

private:
    int port_ = 0;
    std::thread thread_;
};

json chat_ok(const std::string& text) {
    return json{{"choices", json::array({json{{"index", 0},
                                              {"finish_reason", "stop"},
                                              {"message", {{"role", "assistant"}, {"content", text}}}}})},
                {"usage", {{"prompt_tokens", 12}, {"completion_tokens", 3}}}};
}

}  // namespace

TEST_CASE("chat request body") {
    ChatRequest r{TemplateId::persona_present, "hello", {TemplateId::persona_present, 0.1, 0.99, 256}, {}};
    auto body = chat_request_body(r, "m1");
    CHECK(body["model"] == "m1");
    CHECK(body["messages"] == json::array({json{{"role", "user"}, {"content", "hello"}}}));
    CHECK(body["temperature"] == 0.1);
    CHECK(body["top_p"] == 0.99);
    CHECK(body["max_tokens"] == 256);
}

TEST_CASE("chat response parsing") {
    auto reply = parse_chat_response(chat_ok("hi"));
    CHECK(reply.text == "hi");
    CHECK(reply.prompt_tokens == 12);
    CHECK(reply.completion_tokens == 3);

    auto filtered = chat_ok("x");
    filtered["choices"][0]["finish_reason"] = "content_filter";
    CHECK_THROWS_AS(parse_chat_response(filtered), ContentError);
    auto refused = chat_ok("x");
    refused["choices"][0]["message"]["refusal"] = "no";
    refused["choices"][0]["message"]["content"] = nullptr;
    CHECK_THROWS_AS(parse_chat_response(refused), ContentError);
    CHECK_THROWS_AS(parse_chat_response(json::object()), TransportError);
    CHECK_THROWS_AS(parse_chat_response(json{{"choices", json::array()}}), TransportError);
    auto no_usage = chat_ok("y");
    no_usage.erase("usage");
    CHECK(parse_chat_response(no_usage).text == "y");
}

TEST_CASE("embedding request and response") {
    std::vector<std::string> texts{"a", "b"};
    auto body = embedding_request_body(texts, "e1");
    CHECK(body["model"] == "e1");
    CHECK(body["input"] == json::array({"a", "b"}));

    json resp{{"data", json::array({json{{"index", 1}, {"embedding", {0.0, 1.0}}},
                                    json{{"index", 0}, {"embedding", {1.0, 0.0}}}})}};
    auto vs = parse_embedding_response(resp, 2);
    REQUIRE(vs.size() == 2);
    CHECK(vs[0].values == std::vector<double>{1.0, 0.0});
    CHECK(vs[1].values == std::vector<double>{0.0, 1.0});
    CHECK_THROWS_AS(parse_embedding_response(resp, 3), TransportError);
    json dup{{"data", json::array({json{{"index", 0}, {"embedding", {1.0}}},
                                   json{{"index", 0}, {"embedding", {1.0}}}})}};
    CHECK_THROWS_AS(parse_embedding_response(dup, 2), TransportError);
    json bad{{"data", json::array({json{{"index", 0}, {"embedding", {"x"}}}})}};
    CHECK_THROWS_AS(parse_embedding_response(bad, 1), TransportError);
}

TEST_CASE("retryable statuses") {
    CHECK(retryable_status(429));
    CHECK(retryable_status(500));
    CHECK(retryable_status(503));
    CHECK_FALSE(retryable_status(400));
    CHECK_FALSE(retryable_status(401));
    CHECK_FALSE(retryable_status(404));
}

TEST_CASE("chat provider speaks the wire format") {
    LocalServer s;
    json seen;
    std::string auth;
    std::string path;
    s.server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        seen = json::parse(req.body);
        auth = req.get_header_value("Authorization");
        path = req.path;
        res.set_content(chat_ok("pong").dump(), "application/json");
    });
    s.start();
    HttpChatProvider p(Endpoint{s.url(), "chat-model", "secret", 10});
    CHECK(p.id() == "http:chat-model");
    ChatRequest r{TemplateId::mod_is_expand, "ping", SamplingTable{}.get(TemplateId::mod_is_expand), {}};
    auto reply = p.send(r);
    CHECK(reply.text == "pong");
    CHECK(reply.prompt_tokens == 12);
    CHECK(path == "/v1/chat/completions");
    CHECK(auth == "Bearer secret");
    CHECK(seen["model"] == "chat-model");
    CHECK(seen["messages"][0]["content"] == "ping");
    CHECK(seen["temperature"] == 0.1);
    CHECK(seen["top_p"] == 0.99);
}

TEST_CASE("HTTP failures map to transport errors, with retries through the gateway") {
    LocalServer s;
    std::atomic<int> calls{0};
    s.server.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
        if (++calls <= 2) {
            res.status = 503;
            res.set_content("busy", "text/plain");
            return;
        }
        res.set_content(chat_ok("finally").dump(), "application/json");
    });
    s.server.Post("/v2/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
        res.status = 401;
        res.set_content("denied", "text/plain");
    });
    s.start();
    auto provider = std::make_shared<HttpChatProvider>(Endpoint{s.url(), "m", "", 10});
    ChatGateway g(provider, SamplingTable{},
                  GatewayOptions{RetryPolicy{3, std::chrono::milliseconds(1), 0.0}, 2, 0});
    Transcript log;
    CHECK(g.complete(g.make_request(TemplateId::mod_summarize, "x"), log) == "finally");
    CHECK(calls == 3);

    auto v2 = s.url();
    v2.replace(v2.size() - 2, 2, "v2");
    HttpChatProvider denied(Endpoint{v2, "m", "", 10});
    try {
        denied.send(g.make_request(TemplateId::mod_summarize, "x"));
        FAIL("expected TransportError");
    } catch (const TransportError& e) {
        CHECK_FALSE(e.retryable());
        CHECK(std::string(e.what()).find("401") != std::string::npos);
    }

    HttpChatProvider unreachable(Endpoint{"http://127.0.0.1:1/v1", "m", "", 2});
    try {
        unreachable.send(g.make_request(TemplateId::mod_summarize, "x"));
        FAIL("expected TransportError");
    } catch (const TransportError& e) {
        CHECK(e.retryable());
    }
}

TEST_CASE("embedding provider speaks the wire format") {
    LocalServer s;
    json seen;
    s.server.Post("/v1/embeddings", [&](const httplib::Request& req, httplib::Response& res) {
        seen = json::parse(req.body);
        json data = json::array();
        for (std::size_t i = seen["input"].size(); i-- > 0;) {
            data.push_back({{"index", i}, {"embedding", {static_cast<double>(i), 1.0}}});
        }
        res.set_content(json{{"data", data}}.dump(), "application/json");
    });
    s.start();
    HttpEmbeddingProvider p(Endpoint{s.url(), "emb", "k", 10});
    std::vector<std::string> texts{"x", "y", "z"};
    auto batch = p.embed(texts);
    CHECK(seen["model"] == "emb");
    CHECK(seen["input"] == json::array({"x", "y", "z"}));
    REQUIRE(batch.vectors.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(batch.vectors[i].values[0] == static_cast<double>(i));
}
