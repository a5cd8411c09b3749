#include "misery/embedding.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "http_util.hpp"
#include "misery/gateway.hpp"
#include "misery/json.hpp"

namespace misery {

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dim() != b.dim()) {
    throw EmbeddingError("dimension mismatch: " + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    dot += a.values[i] * b.values[i];
    na += a.values[i] * a.values[i];
    nb += b.values[i] * b.values[i];
  }
  if (na == 0.0 || nb == 0.0) throw EmbeddingError("cosine similarity of a zero vector");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

HashEmbedder::HashEmbedder(std::size_t dim) : dim_(dim) {
  if (dim_ == 0) throw EmbeddingError("hash embedder dimension must be positive");
}

std::string HashEmbedder::identity() const { return "hash-fnv1a-" + std::to_string(dim_); }

EmbeddingVector HashEmbedder::embed_one(std::string_view text) const {
  if (text.empty()) throw EmbeddingError("cannot embed empty text");
  std::string padded = " ";
  for (char c : text) padded.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  padded.push_back(' ');

  EmbeddingVector v{std::vector<double>(dim_, 0.0)};
  for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
    v.values[fnv1a64(std::string_view(padded).substr(i, 3)) % dim_] += 1.0;
  }
  std::string word;
  auto flush = [&] {
    if (!word.empty()) v.values[fnv1a64("w:" + word) % dim_] += 2.0;
    word.clear();
  };
  for (char c : padded) {
    if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) word.push_back(c);
    else flush();
  }
  flush();
  return v;
}

std::vector<EmbeddingVector> HashEmbedder::embed(std::span<const std::string> texts) {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed_one(t));
  return out;
}

HttpEmbedder::HttpEmbedder(HttpEmbedderConfig config) : config_(std::move(config)) {
  if (config_.endpoint.empty()) throw ConfigError("embedding provider needs an endpoint");
  credential_ = detail::read_credential(config_.credential_env, "embedding provider");
}

std::string HttpEmbedder::identity() const {
  return "http:" + config_.endpoint + (config_.model.empty() ? "" : "#" + config_.model);
}

std::vector<EmbeddingVector> HttpEmbedder::parse_response(const std::string& body, std::size_t expected) {
  Json j;
  try {
    j = Json::parse(body);
  } catch (const nlohmann::json::exception&) {
    throw EmbeddingError("embedding reply is not JSON: " + detail::excerpt(body));
  }
  if (!j.contains("vectors") || !j["vectors"].is_array()) throw EmbeddingError("embedding reply lacks 'vectors'");
  const auto& arr = j["vectors"];
  if (arr.size() != expected) {
    throw EmbeddingError("embedding reply has " + std::to_string(arr.size()) + " vectors, expected " +
                         std::to_string(expected));
  }
  std::vector<EmbeddingVector> out;
  for (const auto& vec : arr) {
    EmbeddingVector v;
    for (const auto& x : vec) {
      if (!x.is_number()) throw EmbeddingError("embedding entry is not a number");
      const double d = x.get<double>();
      if (!std::isfinite(d)) throw EmbeddingError("embedding entry is not finite");
      v.values.push_back(d);
    }
    if (v.values.empty()) throw EmbeddingError("empty embedding vector");
    if (!out.empty() && out.front().dim() != v.dim()) throw EmbeddingError("embedding dimensions differ");
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<EmbeddingVector> HttpEmbedder::embed(std::span<const std::string> texts) {
  Json req;
  if (!config_.model.empty()) req["model"] = config_.model;
  req["input"] = std::vector<std::string>(texts.begin(), texts.end());
  const std::string auth = config_.auth_scheme.empty() ? credential_ : config_.auth_scheme + " " + credential_;
  const auto result = detail::post_json(config_.endpoint, {{config_.auth_header, auth}}, req.dump(), config_.timeout_s);
  if (result.status < 200 || result.status >= 300) detail::raise_for_status(result, identity());
  return parse_response(result.body, texts.size());
}

EmbeddingVector EmbeddingCache::get_or_compute(const std::string& provider, RecordId id,
                                               const std::function<EmbeddingVector()>& compute) {
  std::lock_guard lock(mu_);
  auto key = std::make_pair(provider, id);
  if (auto it = entries_.find(key); it != entries_.end()) return it->second;
  EmbeddingVector v = compute();
  entries_.emplace(std::move(key), v);
  return v;
}

std::vector<EmbeddingVector> EmbeddingCache::lookup(Embedder& embedder, std::span<const MiseryRecord> records) {
  const std::string provider = embedder.identity();
  std::lock_guard lock(mu_);
  std::vector<std::string> missing_text;
  std::vector<RecordId> missing_id;
  for (const auto& r : records) {
    if (!entries_.contains({provider, r.id}) &&
        std::find(missing_id.begin(), missing_id.end(), r.id) == missing_id.end()) {
      missing_text.push_back(r.statement);
      missing_id.push_back(r.id);
    }
  }
  if (!missing_text.empty()) {
    auto vectors = embedder.embed(missing_text);
    if (vectors.size() != missing_text.size()) throw EmbeddingError("embedder returned the wrong number of vectors");
    for (std::size_t i = 0; i < vectors.size(); ++i) entries_.emplace(std::make_pair(provider, missing_id[i]), std::move(vectors[i]));
  }
  std::vector<EmbeddingVector> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(entries_.at({provider, r.id}));
  return out;
}

std::size_t EmbeddingCache::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

void EmbeddingCache::load(const std::string& path) {
  if (!std::filesystem::exists(path)) return;
  std::ifstream in(path);
  Json j;
  try {
    in >> j;
    std::lock_guard lock(mu_);
    for (const auto& e : j.at("entries")) {
      EmbeddingVector v{e.at("vector").get<std::vector<double>>()};
      entries_.insert_or_assign({e.at("provider").get<std::string>(), e.at("id").get<RecordId>()}, std::move(v));
    }
  } catch (const nlohmann::json::exception& e) {
    throw EmbeddingError("embedding cache '" + path + "': " + e.what());
  }
}

void EmbeddingCache::save(const std::string& path) const {
  Json entries = Json::array();
  {
    std::lock_guard lock(mu_);
    for (const auto& [key, v] : entries_) {
      entries.push_back({{"provider", key.first}, {"id", key.second}, {"vector", v.values}});
    }
  }
  std::ofstream out(path);
  if (!out) throw EmbeddingError("cannot write embedding cache '" + path + "'");
  out << Json{{"version", 1}, {"entries", std::move(entries)}}.dump() << '\n';
}

}  // namespace misery
