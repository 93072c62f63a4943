#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "common.hpp"
#include "jobmatch/eval.hpp"
#include "jobmatch/remote_embedder.hpp"

using namespace jobmatch;
using nlohmann::json;

namespace {

// Local stand-in provider: vector = [text length, 1, 0, ...].
class FakeProvider {
public:
    FakeProvider() {
        server_.Post("/embed", [this](const httplib::Request& req, httplib::Response& res) {
            ++calls_;
            {
                std::lock_guard lock(m_);
                ++in_flight_;
                peak_ = std::max(peak_, in_flight_);
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms_));
            {
                std::lock_guard lock(m_);
                --in_flight_;
            }
            if (fail_first_ > 0) {
                --fail_first_;
                res.status = 503;
                return;
            }
            const json body = json::parse(req.body);
            const std::size_t dim = body.at("dimension");
            json vectors = json::array();
            for (const auto& t : body.at("texts")) {
                std::vector<double> v(dim, 0.0);
                v[0] = static_cast<double>(t.get<std::string>().size());
                if (dim > 1) v[1] = 1.0;
                vectors.push_back(v);
            }
            if (truncate_) vectors.erase(vectors.size() - 1);
            res.set_content(json{{"vectors", vectors}}.dump(), "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~FakeProvider() {
        server_.stop();
        thread_.join();
    }

    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/embed"; }

    std::atomic<int> calls_{0};
    std::atomic<int> fail_first_{0};
    std::atomic<bool> truncate_{false};
    int delay_ms_ = 0;
    int peak_ = 0;

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
    std::mutex m_;
    int in_flight_ = 0;
};

EmbedderConfig remote(const std::string& url) {
    EmbedderConfig c;
    c.kind = EmbedderKind::remote;
    c.provider_endpoint = url;
    c.dimension = 4;
    c.timeout_seconds = 2;
    return c;
}

}  // namespace

TEST(Remote, EmbedsAndPreservesOrderAcrossBatches) {
    FakeProvider p;
    p.delay_ms_ = 5;
    EmbedderConfig c = remote(p.url());
    c.batch_size = 3;
    c.max_in_flight = 2;
    const RemoteEmbedder e(c);
    std::vector<NormalizedDoc> docs;
    for (int i = 0; i < 20; ++i) docs.push_back(normalize(std::string(static_cast<std::size_t>(i + 1), 'a')));
    const auto out = e.embed_batch(docs);
    ASSERT_EQ(out.size(), docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) EXPECT_EQ(out[i].values()[0], render(docs[i]).size()) << i;
    EXPECT_EQ(p.calls_.load(), 7);
    EXPECT_LE(p.peak_, 2);
}

TEST(Remote, RetriesThenSucceeds) {
    FakeProvider p;
    p.fail_first_ = 2;
    const RemoteEmbedder e(remote(p.url()));
    const auto doc = normalize("hello");
    const auto v = e.embed(doc);
    EXPECT_EQ(v.values()[0], static_cast<double>(render(doc).size()));
    EXPECT_EQ(p.calls_.load(), 3);
}

TEST(Remote, GivesUpWithMetadata) {
    FakeProvider p;
    p.fail_first_ = 100;
    const RemoteEmbedder e(remote(p.url()));
    try {
        e.embed(normalize("hello"));
        FAIL();
    } catch (const ProviderError& err) {
        EXPECT_EQ(err.attempts(), 3u);
        EXPECT_EQ(err.status(), 503);
    }
    EXPECT_EQ(p.calls_.load(), 3);
}

TEST(Remote, ShapeMismatchIsNotRetried) {
    FakeProvider p;
    p.truncate_ = true;
    const RemoteEmbedder e(remote(p.url()));
    EXPECT_THROW(e.embed_texts({"a", "b"}), ProviderError);
    EXPECT_EQ(p.calls_.load(), 1);
}

TEST(Remote, TransportErrorReportsNoStatus) {
    int port = 0;
    {
        httplib::Server s;
        port = s.bind_to_any_port("127.0.0.1");
    }
    EmbedderConfig c = remote("http://127.0.0.1:" + std::to_string(port) + "/embed");
    c.retries = 1;
    const RemoteEmbedder e(c);
    try {
        e.embed(normalize("x"));
        FAIL();
    } catch (const ProviderError& err) {
        EXPECT_EQ(err.status(), -1);
        EXPECT_EQ(err.attempts(), 2u);
    }
}

TEST(Remote, RejectsNonHttpEndpoint) {
    EXPECT_THROW(RemoteEmbedder(remote("https://example.com/embed")), std::invalid_argument);
    EXPECT_THROW(RemoteEmbedder(remote("ftp://example.com")), std::invalid_argument);
}

TEST(Remote, ScreeningThroughProvider) {
    FakeProvider p;
    EmbedderConfig c = remote(p.url());
    const EvalContext ctx{jmtest::ontology(), jmtest::pii_rules(), 1};
    std::vector<LabeledPair> corpus(jmtest::default_corpus().begin(), jmtest::default_corpus().begin() + 10);
    const auto out = run_screen(corpus, SemanticScreener{c, 0.5}, ctx);
    EXPECT_EQ(out.size(), 10u);
}
