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

#include "dsmopt/retrieval.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <iterator>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "dsmopt/errors.hpp"
#include "text_util.hpp"

namespace dsmopt {

namespace {

constexpr char kMagic[8] = {'D', 'S', 'M', 'R', 'I', 'D', 'X', '1'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kMaxString = 1U << 30;

bool is_continuation(unsigned char c) { return (c & 0xC0U) == 0x80U; }

void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFFU);
  out.write(b, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFFU);
  out.write(b, 8);
}

void put_str(std::ostream& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void read_exact(std::istream& in, char* buf, std::size_t n, const char* what) {
  in.read(buf, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) {
    throw IndexFormatError(std::string("index truncated while reading ") + what);
  }
}

std::uint32_t get_u32(std::istream& in, const char* what) {
  unsigned char b[4];
  read_exact(in, reinterpret_cast<char*>(b), 4, what);
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

std::uint64_t get_u64(std::istream& in, const char* what) {
  unsigned char b[8];
  read_exact(in, reinterpret_cast<char*>(b), 8, what);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

std::string get_str(std::istream& in, const char* what) {
  const std::uint32_t n = get_u32(in, what);
  if (n > kMaxString) throw IndexFormatError(std::string("implausible length for ") + what);
  std::string s(n, '\0');
  if (n > 0) read_exact(in, s.data(), n, what);
  return s;
}

bool ranks_before(double sa, std::uint32_t ia, double sb, std::uint32_t ib) {
  if (sa != sb) return sa > sb;
  return ia < ib;
}

}  // namespace

std::vector<Chunk> chunk_corpus(const std::vector<Document>& docs, const ChunkParams& params) {
  if (params.window_chars == 0 || params.window_chars <= params.overlap_chars) {
    throw std::invalid_argument("chunk window must be larger than the overlap");
  }
  const std::size_t stride = params.window_chars - params.overlap_chars;
  std::vector<Chunk> out;
  for (const Document& d : docs) {
    // Byte offset of every code point, plus the end.
    std::vector<std::size_t> cp;
    for (std::size_t i = 0; i < d.text.size(); ++i) {
      if (!is_continuation(static_cast<unsigned char>(d.text[i]))) cp.push_back(i);
    }
    const std::size_t n = cp.size();
    cp.push_back(d.text.size());
    if (n == 0) continue;
    for (std::size_t start = 0;; start += stride) {
      const std::size_t end = std::min(start + params.window_chars, n);
      Chunk c;
      c.id = static_cast<std::uint32_t>(out.size() + 1);
      c.doc_id = d.doc_id;
      c.span_start = cp[start];
      c.span_end = cp[end];
      c.text = d.text.substr(cp[start], cp[end] - cp[start]);
      out.push_back(std::move(c));
      if (end == n) break;
    }
  }
  if (out.empty()) throw EmptyCorpus("corpus contains no text");
  return out;
}

std::vector<Document> read_corpus(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw EmptyCorpus("corpus directory not found: " + dir.string());
  std::vector<Document> docs;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    docs.push_back(Document{fs::relative(entry.path(), dir).generic_string(), std::move(text)});
  }
  std::sort(docs.begin(), docs.end(),
            [](const Document& a, const Document& b) { return a.doc_id < b.doc_id; });
  return docs;
}

HashingEmbeddingBackend::HashingEmbeddingBackend(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw std::invalid_argument("embedding dimension must be positive");
}

std::string HashingEmbeddingBackend::id() const {
  return "hash-bow-v1-fnv1a-d" + std::to_string(dim_);
}

std::vector<std::string> HashingEmbeddingBackend::tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (unsigned char c : text) {
    if (c >= 0x80 || std::isalnum(c)) {
      cur.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

std::uint64_t HashingEmbeddingBackend::fnv1a(std::string_view token) { return detail::fnv1a64(token); }

Embedding HashingEmbeddingBackend::embed(std::string_view text) const {
  Embedding v(dim_, 0.0);
  for (const std::string& tok : tokenize(text)) {
    const std::uint64_t h = fnv1a(tok);
    v[h % dim_] += ((h >> 32) & 1U) ? -1.0 : 1.0;
  }
  double norm2 = 0.0;
  for (double x : v) norm2 += x * x;
  if (norm2 > 0.0) {
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& x : v) x *= inv;
  }
  return v;
}

Embedding ExternalEmbeddingBackend::embed(std::string_view) const {
  throw BackendUnavailable("embedding backend '" + name_ + "' is not configured");
}

double similarity(const Embedding& u, const Embedding& v) {
  if (u.size() != v.size()) {
    throw DimMismatch("vectors of dimension " + std::to_string(u.size()) + " and " +
                      std::to_string(v.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = u[i] - v[i];
    sum += d * d;
  }
  return 0.0 - sum;
}

RetrievalIndex::RetrievalIndex(std::string backend_id, std::size_t dim)
    : backend_id_(std::move(backend_id)), dim_(dim) {}

RetrievalIndex RetrievalIndex::build(std::vector<Chunk> chunks, const EmbeddingBackend& backend) {
  RetrievalIndex idx(backend.id(), backend.dim());
  for (Chunk& c : chunks) {
    Embedding v = backend.embed(c.text);
    idx.add(std::move(c), std::move(v));
  }
  return idx;
}

void RetrievalIndex::add(Chunk chunk, Embedding vector) {
  if (vector.size() != dim_) {
    throw DimMismatch("index has dimension " + std::to_string(dim_) + ", vector has " +
                      std::to_string(vector.size()));
  }
  chunks_.push_back(std::move(chunk));
  vectors_.push_back(std::move(vector));
}

std::vector<ScoredChunk> RetrievalIndex::top_k(const Embedding& query, std::size_t k) const {
  if (k == 0) throw std::invalid_argument("k must be at least 1");
  if (chunks_.empty()) throw EmptyIndex("index holds no chunks");
  if (query.size() != dim_) {
    throw DimMismatch("query has dimension " + std::to_string(query.size()) + ", index has " +
                      std::to_string(dim_));
  }
  std::vector<double> score(chunks_.size());
  for (std::size_t i = 0; i < chunks_.size(); ++i) score[i] = similarity(query, vectors_[i]);
  std::vector<std::size_t> order(chunks_.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t take = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      return ranks_before(score[a], chunks_[a].id, score[b], chunks_[b].id);
                    });
  std::vector<ScoredChunk> out;
  for (std::size_t i = 0; i < take; ++i) out.push_back(ScoredChunk{&chunks_[order[i]], score[order[i]]});
  return out;
}

void RetrievalIndex::save(std::ostream& out) const {
  out.write(kMagic, sizeof kMagic);
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(dim_));
  put_u32(out, static_cast<std::uint32_t>(chunks_.size()));
  put_str(out, backend_id_);
  for (const Chunk& c : chunks_) {
    put_u32(out, c.id);
    put_str(out, c.doc_id);
    put_u64(out, c.span_start);
    put_u64(out, c.span_end);
    put_str(out, c.text);
  }
  for (const Embedding& v : vectors_) {
    for (double x : v) put_u64(out, std::bit_cast<std::uint64_t>(x));
  }
}

void RetrievalIndex::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write index file " + path.string());
  save(out);
  if (!out) throw std::runtime_error("failed writing index file " + path.string());
}

RetrievalIndex RetrievalIndex::load(std::istream& in) {
  char magic[sizeof kMagic];
  read_exact(in, magic, sizeof magic, "magic");
  if (!std::equal(std::begin(magic), std::end(magic), std::begin(kMagic))) {
    throw IndexFormatError("not a dsmopt index file");
  }
  const std::uint32_t version = get_u32(in, "version");
  if (version != kVersion) throw IndexFormatError("unsupported index version " + std::to_string(version));
  const std::uint32_t dim = get_u32(in, "dim");
  const std::uint32_t n = get_u32(in, "chunk count");
  RetrievalIndex idx(get_str(in, "backend id"), dim);
  std::vector<Chunk> chunks;
  for (std::uint32_t i = 0; i < n; ++i) {
    Chunk c;
    c.id = get_u32(in, "chunk id");
    c.doc_id = get_str(in, "doc id");
    c.span_start = get_u64(in, "span");
    c.span_end = get_u64(in, "span");
    c.text = get_str(in, "chunk text");
    if (c.span_end < c.span_start) throw IndexFormatError("chunk span is inverted");
    chunks.push_back(std::move(c));
  }
  for (Chunk& c : chunks) {
    Embedding v(dim);
    for (double& x : v) x = std::bit_cast<double>(get_u64(in, "vector"));
    idx.add(std::move(c), std::move(v));
  }
  if (in.peek() != std::char_traits<char>::eof()) throw IndexFormatError("trailing bytes after index");
  return idx;
}

RetrievalIndex RetrievalIndex::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IndexFormatError("cannot open index file " + path.string());
  return load(in);
}

ContextBundle aggregate_context(std::string_view query, std::vector<std::pair<Chunk, double>> retrieved) {
  std::stable_sort(retrieved.begin(), retrieved.end(), [](const auto& a, const auto& b) {
    return ranks_before(a.second, a.first.id, b.second, b.first.id);
  });
  ContextBundle b;
  b.query = std::string(query);
  std::string text(query);
  for (const auto& [chunk, score] : retrieved) {
    text += "\n\n[chunk " + std::to_string(chunk.id) + " @ " + chunk.doc_id + "]\n" + chunk.text;
  }
  b.context_text = std::move(text);
  b.retrieved = std::move(retrieved);
  return b;
}

ContextBundle aggregate_context(std::string_view query, const std::vector<ScoredChunk>& retrieved) {
  std::vector<std::pair<Chunk, double>> copy;
  for (const ScoredChunk& s : retrieved) copy.emplace_back(*s.chunk, s.score);
  return aggregate_context(query, std::move(copy));
}

std::string EchoGenerationBackend::generate(const ContextBundle& bundle) const {
  std::ostringstream out;
  out << "chunks:";
  for (const auto& [chunk, score] : bundle.retrieved) out << ' ' << chunk.id;
  out << '\n' << bundle.context_text;
  return out.str();
}

std::string ExternalGenerationBackend::generate(const ContextBundle&) const {
  throw BackendUnavailable("no generation backend is configured");
}

}  // namespace dsmopt
