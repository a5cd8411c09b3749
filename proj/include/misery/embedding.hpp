#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "misery/dataset.hpp"

namespace misery {

class EmbeddingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EmbeddingVector {
  std::vector<double> values;

  std::size_t dim() const { return values.size(); }
  bool operator==(const EmbeddingVector&) const = default;
};

/// dot(a, b) / (|a| |b|). Throws on dimension mismatch or a zero norm.
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::string identity() const = 0;
  virtual std::vector<EmbeddingVector> embed(std::span<const std::string> texts) = 0;
};

/// Deterministic offline embedder (feature hashing), `dim` buckets:
///   - text is ASCII-lowercased and padded with one space on each side;
///   - every 3-byte window adds 1.0 to bucket fnv1a64(window) % dim;
///   - every maximal [a-z0-9] run w adds 2.0 to bucket fnv1a64("w:" + w) % dim.
/// fnv1a64 uses offset 0xcbf29ce484222325 and prime 0x100000001b3. Any
/// non-empty text yields a vector with positive norm.
class HashEmbedder : public Embedder {
 public:
  explicit HashEmbedder(std::size_t dim = 256);
  std::string identity() const override;
  std::vector<EmbeddingVector> embed(std::span<const std::string> texts) override;
  EmbeddingVector embed_one(std::string_view text) const;

 private:
  std::size_t dim_;
};

struct HttpEmbedderConfig {
  std::string endpoint;
  std::string model;  // optional, sent as "model" when non-empty
  std::string credential_env;
  std::string auth_header = "Authorization";
  std::string auth_scheme = "Bearer";
  double timeout_s = 60.0;
};

/// Remote provider: POST {"input": [texts]} -> {"vectors": [[real]]}.
class HttpEmbedder : public Embedder {
 public:
  explicit HttpEmbedder(HttpEmbedderConfig config);
  std::string identity() const override;
  std::vector<EmbeddingVector> embed(std::span<const std::string> texts) override;

  static std::vector<EmbeddingVector> parse_response(const std::string& body, std::size_t expected);

 private:
  HttpEmbedderConfig config_;
  std::string credential_;
};

std::uint64_t fnv1a64(std::string_view bytes);

/// Thread-safe (provider, record id) -> vector map. Lookups that miss are
/// computed under the lock, so concurrent requests for one key store a single
/// value. Persisted as a JSON sidecar.
class EmbeddingCache {
 public:
  EmbeddingVector get_or_compute(const std::string& provider, RecordId id,
                                 const std::function<EmbeddingVector()>& compute);

  /// Vectors for `records` in order, embedding all misses in one provider call.
  std::vector<EmbeddingVector> lookup(Embedder& embedder, std::span<const MiseryRecord> records);

  std::size_t size() const;
  void load(const std::string& path);  // merges; missing file is not an error
  void save(const std::string& path) const;

 private:
  mutable std::mutex mu_;
  std::map<std::pair<std::string, RecordId>, EmbeddingVector> entries_;
};

}  // namespace misery
