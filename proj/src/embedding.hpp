#pragma once

#include <opencv2/core.hpp>

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace cvad::embed {

using Vector = std::vector<double>;

// Dot product. Inputs are expected to be unit-norm, so the result lies in
// [-1, 1] up to rounding.
double similarity(std::span<const double> a, std::span<const double> b);

double l2_norm(std::span<const double> v);
void normalize(Vector& v);

// Abstract embedding backend (image encoder + text encoder).
class Backend {
public:
    virtual ~Backend() = default;
    virtual Vector embed_image(const cv::Mat& image) = 0;
    virtual Vector embed_text(const std::string& text) = 0;
    virtual int dim() const = 0;
    virtual std::string id() const = 0;
};

// Deterministic test backend: content bytes are hashed to seed a PRNG that
// emits a fixed pseudo-random unit vector. Identical inputs always map to
// identical vectors.
class MockBackend : public Backend {
public:
    explicit MockBackend(std::uint64_t seed = 0, int dim = 512);
    Vector embed_image(const cv::Mat& image) override;
    Vector embed_text(const std::string& text) override;
    int dim() const override { return dim_; }
    std::string id() const override;

private:
    Vector from_hash(std::uint64_t h) const;
    std::uint64_t seed_;
    int dim_;
};

struct HttpBackendConfig {
    std::string url;          // e.g. http://host:port
    std::string image_path = "/embed/image";
    std::string text_path = "/embed/text";
    int dim = 512;
    int timeout_ms = 30000;
    int retries = 2;          // additional attempts after the first
};

// Remote encoder: POST base64 image or raw text, JSON float array back.
class HttpBackend : public Backend {
public:
    explicit HttpBackend(HttpBackendConfig cfg);
    Vector embed_image(const cv::Mat& image) override;
    Vector embed_text(const std::string& text) override;
    int dim() const override { return cfg_.dim; }
    std::string id() const override { return "http:" + cfg_.url; }

private:
    Vector post(const std::string& path, const std::string& body);
    HttpBackendConfig cfg_;
};

// Gateway in front of a backend: normalizes everything on receipt, expands
// text queries through prompt templates, and caches by content hash.
class Gateway {
public:
    explicit Gateway(std::shared_ptr<Backend> backend,
                     std::vector<std::string> templates = {"a photo of a {}",
                                                           "a photo of the {}"});

    Vector encode_image(const cv::Mat& image);

    // Unit-norm mean of the templated expansions' embeddings.
    Vector encode_text(const std::string& query);

    int dim() const { return backend_->dim(); }
    std::size_t cache_size() const;

private:
    Vector cached(std::uint64_t key, const std::function<Vector()>& compute);
    Vector check(Vector v) const; // normalize + dimension check

    std::shared_ptr<Backend> backend_;
    std::vector<std::string> templates_;
    mutable std::mutex mutex_;
    std::unordered_map<std::uint64_t, Vector> cache_;
};

// Substitutes every "{}" in the template with the query text.
std::string apply_template(const std::string& tmpl, const std::string& query);

} // namespace cvad::embed
