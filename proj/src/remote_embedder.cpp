#include "jobmatch/remote_embedder.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <regex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "jobmatch/errors.hpp"

namespace jobmatch {

namespace {

constexpr auto kBackoffBase = std::chrono::milliseconds(100);

}  // namespace

RemoteEmbedder::RemoteEmbedder(EmbedderConfig config) : config_(std::move(config)) {
    validate(config_);
    static const std::regex kUrl(R"(^(http)://([^/:]+)(:([0-9]+))?(/.*)?$)");
    std::smatch m;
    const std::string& url = *config_.provider_endpoint;
    if (!std::regex_match(url, m, kUrl))
        throw std::invalid_argument("provider_endpoint must be an http://host[:port]/path URL: " + url);
    host_port_ = "http://" + m[2].str() + (m[4].matched ? ":" + m[4].str() : "");
    path_ = m[5].matched ? m[5].str() : "/";
}

std::vector<EmbeddingVector> RemoteEmbedder::embed_texts(const std::vector<std::string>& texts) const {
    const nlohmann::json body = {{"dimension", config_.dimension}, {"texts", texts}};
    const std::string payload = body.dump();
    const auto timeout = std::chrono::duration<double>(config_.timeout_seconds);
    const unsigned max_attempts = config_.retries + 1;

    int status = -1;
    std::string last_error;
    for (unsigned attempt = 1; attempt <= max_attempts; ++attempt) {
        httplib::Client client(host_port_);
        client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
        client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
        client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
        auto res = client.Post(path_, payload, "application/json");
        if (!res) {
            status = -1;
            last_error = "transport error: " + httplib::to_string(res.error());
        } else if (res->status != 200) {
            status = res->status;
            last_error = "provider returned HTTP " + std::to_string(res->status);
        } else {
            status = 200;
            nlohmann::json reply;
            try {
                reply = nlohmann::json::parse(res->body);
            } catch (const nlohmann::json::exception&) {
                throw ProviderError("provider reply is not JSON", attempt, status);
            }
            if (!reply.is_object() || !reply.contains("vectors") || !reply["vectors"].is_array() ||
                reply["vectors"].size() != texts.size())
                throw ProviderError("provider reply shape mismatch", attempt, status);
            std::vector<EmbeddingVector> out;
            out.reserve(texts.size());
            for (const auto& v : reply["vectors"]) {
                if (!v.is_array() || v.size() != config_.dimension)
                    throw ProviderError("provider vector has wrong dimension", attempt, status);
                std::vector<double> values;
                values.reserve(v.size());
                for (const auto& x : v) {
                    if (!x.is_number()) throw ProviderError("provider vector has non-numeric entries", attempt, status);
                    values.push_back(x.get<double>());
                }
                EmbeddingVector ev(std::move(values));
                if (!(ev.norm() > 0.0) || !std::isfinite(ev.norm())) throw UnembeddableDocument();
                out.push_back(std::move(ev));
            }
            return out;
        }
        if (attempt < max_attempts) std::this_thread::sleep_for(kBackoffBase * (1U << (attempt - 1)));
    }
    throw ProviderError(last_error + " from " + host_port_ + path_, max_attempts, status);
}

EmbeddingVector RemoteEmbedder::embed(const NormalizedDoc& doc) const {
    return embed_texts({render(doc)}).front();
}

std::vector<EmbeddingVector> RemoteEmbedder::embed_batch(std::span<const NormalizedDoc> docs, unsigned) const {
    const std::size_t batch = config_.batch_size;
    const std::size_t n_batches = (docs.size() + batch - 1) / batch;
    std::vector<EmbeddingVector> out(docs.size());
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::size_t error_batch = n_batches;
    std::exception_ptr error;

    auto worker = [&] {
        for (;;) {
            const std::size_t b = next.fetch_add(1);
            if (b >= n_batches) return;
            const std::size_t begin = b * batch;
            const std::size_t end = std::min(docs.size(), begin + batch);
            try {
                std::vector<std::string> texts;
                for (std::size_t i = begin; i < end; ++i) texts.push_back(render(docs[i]));
                auto vectors = embed_texts(texts);
                for (std::size_t i = begin; i < end; ++i) out[i] = std::move(vectors[i - begin]);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (b < error_batch) {
                    error_batch = b;
                    error = std::current_exception();
                }
            }
        }
    };
    const std::size_t n_threads = std::min<std::size_t>(config_.max_in_flight, n_batches);
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
    return out;
}

}  // namespace jobmatch
