#include "embedding.hpp"

#include "base64.hpp"
#include "error.hpp"
#include "hash.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <opencv2/imgcodecs.hpp>

#include <cmath>
#include <random>

namespace cvad::embed {

namespace {

// Hashes dimensions, type, and pixel bytes. Row-wise so ROI views (which are
// not continuous in memory) hash the same as their deep copies.
std::uint64_t hash_image(const cv::Mat& image, std::uint64_t seed) {
    int meta[3] = {image.rows, image.cols, image.type()};
    std::uint64_t h = fnv1a64(meta, sizeof(meta), seed);
    std::size_t row_bytes = image.cols * image.elemSize();
    for (int r = 0; r < image.rows; ++r)
        h = fnv1a64(image.ptr(r), row_bytes, h);
    return h;
}

} // namespace

double similarity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw config_error("embedding dimension mismatch in similarity");
    double dot = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
    return dot;
}

double l2_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

void normalize(Vector& v) {
    double n = l2_norm(v);
    if (n <= 0.0)
        throw backend_error("backend returned a zero embedding vector");
    for (double& x : v) x /= n;
}

MockBackend::MockBackend(std::uint64_t seed, int dim) : seed_(seed), dim_(dim) {}

Vector MockBackend::from_hash(std::uint64_t h) const {
    std::mt19937_64 rng(h);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector v(dim_);
    for (double& x : v) x = normal(rng);
    normalize(v);
    return v;
}

Vector MockBackend::embed_image(const cv::Mat& image) {
    return from_hash(hash_image(image, seed_ ^ 0x1111111111111111ULL));
}

Vector MockBackend::embed_text(const std::string& text) {
    return from_hash(fnv1a64(text, seed_ ^ 0x2222222222222222ULL));
}

std::string MockBackend::id() const {
    return "mock:" + std::to_string(seed_) + ":" + std::to_string(dim_);
}

HttpBackend::HttpBackend(HttpBackendConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.url.empty())
        throw config_error("embedding backend URL not configured");
}

Vector HttpBackend::post(const std::string& path, const std::string& body) {
    httplib::Client client(cfg_.url);
    client.set_connection_timeout(0, cfg_.timeout_ms * 1000LL);
    client.set_read_timeout(cfg_.timeout_ms / 1000, (cfg_.timeout_ms % 1000) * 1000);

    std::string last_error;
    for (int attempt = 0; attempt <= cfg_.retries; ++attempt) {
        auto res = client.Post(path, body, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        auto json = nlohmann::json::parse(res->body, nullptr, false);
        if (json.is_discarded() || !json.contains("embedding")) {
            last_error = "malformed embedding response";
            continue;
        }
        Vector v = json["embedding"].get<Vector>();
        if (static_cast<int>(v.size()) != cfg_.dim)
            throw config_error("embedding dimension mismatch: backend returned " +
                               std::to_string(v.size()) + ", configured " +
                               std::to_string(cfg_.dim));
        return v;
    }
    throw backend_error("embedding backend " + cfg_.url + " failed after " +
                        std::to_string(cfg_.retries + 1) + " attempts (" + last_error + ")");
}

Vector HttpBackend::embed_image(const cv::Mat& image) {
    std::vector<uchar> png;
    cv::imencode(".png", image, png);
    nlohmann::json req = {{"image_b64", base64_encode(png.data(), png.size())}};
    return post(cfg_.image_path, req.dump());
}

Vector HttpBackend::embed_text(const std::string& text) {
    nlohmann::json req = {{"text", text}};
    return post(cfg_.text_path, req.dump());
}

std::string apply_template(const std::string& tmpl, const std::string& query) {
    std::string out = tmpl;
    std::size_t pos = 0;
    while ((pos = out.find("{}", pos)) != std::string::npos) {
        out.replace(pos, 2, query);
        pos += query.size();
    }
    return out;
}

Gateway::Gateway(std::shared_ptr<Backend> backend, std::vector<std::string> templates)
    : backend_(std::move(backend)), templates_(std::move(templates)) {
    if (!backend_)
        throw config_error("embedding gateway requires a backend");
    if (templates_.empty())
        throw config_error("text template list must be non-empty");
}

Vector Gateway::check(Vector v) const {
    if (static_cast<int>(v.size()) != backend_->dim())
        throw config_error("backend embedding dimension mismatch");
    normalize(v);
    return v;
}

Vector Gateway::cached(std::uint64_t key, const std::function<Vector()>& compute) {
    {
        std::lock_guard lock(mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }
    Vector v = check(compute());
    std::lock_guard lock(mutex_);
    cache_[key] = v; // values are deterministic per key; last writer wins
    return v;
}

Vector Gateway::encode_image(const cv::Mat& image) {
    if (image.empty() || image.type() != CV_8UC3)
        throw data_error("encode_image expects a non-empty 8-bit RGB image");
    std::uint64_t key = hash_image(image, fnv1a64(backend_->id()));
    return cached(key, [&] { return backend_->embed_image(image); });
}

Vector Gateway::encode_text(const std::string& query) {
    std::string trimmed = query;
    trimmed.erase(0, trimmed.find_first_not_of(" \t\n\r"));
    trimmed.erase(trimmed.find_last_not_of(" \t\n\r") + 1);
    if (trimmed.empty())
        throw data_error("empty text query");

    std::uint64_t key = fnv1a64("text|" + trimmed, fnv1a64(backend_->id()));
    return cached(key, [&] {
        Vector mean(backend_->dim(), 0.0);
        for (const auto& tmpl : templates_) {
            Vector v = check(backend_->embed_text(apply_template(tmpl, trimmed)));
            for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += v[i];
        }
        for (double& x : mean) x /= static_cast<double>(templates_.size());
        return mean;
    });
}

std::size_t Gateway::cache_size() const {
    std::lock_guard lock(mutex_);
    return cache_.size();
}

} // namespace cvad::embed
