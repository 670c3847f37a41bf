// Copyright 2026 The dsmopt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Retrieval over a text corpus: chunking, embedding, exact top-K search by
// negative squared Euclidean distance, and context aggregation.
//
// The on-disk index layout is documented in docs/index-format.md.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dsmopt {

struct Document {
  std::string doc_id;
  std::string text;
};

struct Chunk {
  std::uint32_t id = 0;  // 1..N in corpus order
  std::string doc_id;
  std::string text;
  std::uint64_t span_start = 0;  // byte offsets into the source document
  std::uint64_t span_end = 0;

  bool operator==(const Chunk&) const = default;
};

struct ChunkParams {
  std::size_t window_chars = 1200;
  std::size_t overlap_chars = 200;
};

/// Sliding character windows (UTF-8 code points) over each document. Empty
/// documents contribute nothing. Throws EmptyCorpus when no chunk results,
/// std::invalid_argument when the window does not exceed the overlap.
std::vector<Chunk> chunk_corpus(const std::vector<Document>& docs, const ChunkParams& params = {});

/// Every regular file under `dir`, doc_id = path relative to `dir` with '/'
/// separators, sorted by doc_id.
std::vector<Document> read_corpus(const std::filesystem::path& dir);

using Embedding = std::vector<double>;

class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;
  virtual std::string id() const = 0;
  virtual std::size_t dim() const = 0;
  virtual Embedding embed(std::string_view text) const = 0;
};

/// Reference backend: lowercase alphanumeric tokens (bytes >= 0x80 count as
/// token characters), each hashed with 64-bit FNV-1a into bucket h % dim with
/// sign taken from bit 32, then L2-normalised. Text without tokens maps to
/// the zero vector.
class HashingEmbeddingBackend : public EmbeddingBackend {
 public:
  explicit HashingEmbeddingBackend(std::size_t dim = 256);

  std::string id() const override;
  std::size_t dim() const override { return dim_; }
  Embedding embed(std::string_view text) const override;

  static std::vector<std::string> tokenize(std::string_view text);
  static std::uint64_t fnv1a(std::string_view token);

 private:
  std::size_t dim_;
};

/// Placeholder for a hosted embedding service; always throws
/// BackendUnavailable.
class ExternalEmbeddingBackend : public EmbeddingBackend {
 public:
  ExternalEmbeddingBackend(std::string name, std::size_t dim) : name_(std::move(name)), dim_(dim) {}
  std::string id() const override { return name_; }
  std::size_t dim() const override { return dim_; }
  Embedding embed(std::string_view text) const override;

 private:
  std::string name_;
  std::size_t dim_;
};

/// -||u - v||^2. Throws DimMismatch.
double similarity(const Embedding& u, const Embedding& v);

struct ScoredChunk {
  const Chunk* chunk = nullptr;
  double score = 0.0;
};

class RetrievalIndex {
 public:
  RetrievalIndex() = default;
  RetrievalIndex(std::string backend_id, std::size_t dim);

  static RetrievalIndex build(std::vector<Chunk> chunks, const EmbeddingBackend& backend);

  /// Appends a chunk; throws DimMismatch when the vector has the wrong size.
  void add(Chunk chunk, Embedding vector);

  const std::string& backend_id() const { return backend_id_; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return chunks_.size(); }
  const std::vector<Chunk>& chunks() const { return chunks_; }
  const std::vector<Embedding>& vectors() const { return vectors_; }

  /// The min(k, N) highest-scoring chunks, best first, ties by ascending id.
  /// Throws EmptyIndex, DimMismatch, or std::invalid_argument for k == 0.
  std::vector<ScoredChunk> top_k(const Embedding& query, std::size_t k) const;

  void save(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;
  /// Throws IndexFormatError on a malformed or truncated file.
  static RetrievalIndex load(std::istream& in);
  static RetrievalIndex load(const std::filesystem::path& path);

 private:
  std::string backend_id_;
  std::size_t dim_ = 0;
  std::vector<Chunk> chunks_;
  std::vector<Embedding> vectors_;
};

struct ContextBundle {
  std::string query;
  std::vector<std::pair<Chunk, double>> retrieved;
  std::string context_text;
};

/// Query, a blank line, then each chunk as "[chunk <id> @ <doc_id>]\n<text>"
/// separated by blank lines. Input is re-sorted by descending score, then id.
ContextBundle aggregate_context(std::string_view query, std::vector<std::pair<Chunk, double>> retrieved);

ContextBundle aggregate_context(std::string_view query, const std::vector<ScoredChunk>& retrieved);

class GenerationBackend {
 public:
  virtual ~GenerationBackend() = default;
  virtual std::string generate(const ContextBundle& bundle) const = 0;
};

/// Deterministic stub: lists the retrieved chunk ids, then the context text.
class EchoGenerationBackend : public GenerationBackend {
 public:
  std::string generate(const ContextBundle& bundle) const override;
};

/// Stands in for a hosted language model; throws BackendUnavailable.
class ExternalGenerationBackend : public GenerationBackend {
 public:
  std::string generate(const ContextBundle& bundle) const override;
};

}  // namespace dsmopt
