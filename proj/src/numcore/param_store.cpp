// Copyright 2026 The wclner Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "wclner/numcore/param_store.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>

#include "wclner/error.hpp"

namespace wclner {

Tensor& ParamStore::Set(const std::string& name, Tensor t) {
  return params_.insert_or_assign(name, std::move(t)).first->second;
}

Tensor& ParamStore::CreateUniform(const std::string& name, const Shape& shape,
                                  double scale, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  Matrix m(shape.rows(), shape.cols());
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return Set(name, Tensor(shape, std::move(m), true));
}

Tensor& ParamStore::CreateZeros(const std::string& name, const Shape& shape) {
  return Set(name, Tensor::Zeros(shape, true));
}

bool ParamStore::contains(const std::string& name) const {
  return params_.count(name) != 0;
}

Tensor& ParamStore::at(const std::string& name) {
  auto it = params_.find(name);
  if (it == params_.end()) throw ConfigError("unknown parameter '" + name + "'");
  return it->second;
}

const Tensor& ParamStore::at(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw ConfigError("unknown parameter '" + name + "'");
  return it->second;
}

std::vector<std::string> ParamStore::names() const {
  std::vector<std::string> out;
  out.reserve(params_.size());
  for (const auto& [name, t] : params_) out.push_back(name);
  return out;
}

ParamStore ParamStore::Clone() const {
  ParamStore out;
  for (const auto& [name, t] : params_) out.params_.emplace(name, t.Clone());
  out.meta_ = meta_;
  return out;
}

void ParamStore::ExtractPrefix(const std::string& prefix,
                               ParamStore& out) const {
  for (const auto& [name, t] : params_) {
    if (name.rfind(prefix, 0) == 0) out.Set(name, t);
  }
}

void ParamStore::SetRequiresGrad(bool on) {
  for (auto& [name, t] : params_) t.set_requires_grad(on);
}

void ParamStore::ClearGrads() {
  for (auto& [name, t] : params_) t.clear_grad();
}

void sgd_step(ParamStore& params, double lr) {
  if (!(lr >= 0.0) || !std::isfinite(lr)) {
    throw ConfigError("learning rate must be a finite non-negative number");
  }
  std::string bad;
  for (const auto& [name, t] : params.params()) {
    if (t.defined() && t.has_grad() && !t.node()->grad.allFinite()) {
      if (!bad.empty()) bad += ", ";
      bad += name;
    }
  }
  if (!bad.empty()) {
    throw NumericError("non-finite gradient in parameters: " + bad);
  }
  for (const auto& [name, t] : params.params()) {
    if (!t.has_grad()) continue;
    detail::Node& n = *t.node();
    if (lr != 0.0) n.value.noalias() -= lr * n.grad;
    n.grad.resize(0, 0);
  }
}

namespace {

void PutU32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

void PutU64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 8);
}

class Reader {
 public:
  Reader(std::istream& in, const std::string& source)
      : in_(in), source_(source) {}

  std::uint32_t U32() {
    unsigned char b[4];
    Read(b, 4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
    return v;
  }

  std::uint64_t U64() {
    unsigned char b[8];
    Read(b, 8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
  }

  std::string Bytes(std::uint64_t n) {
    if (n > (1ull << 32)) Fail("implausible string length");
    std::string s(n, '\0');
    if (n) Read(reinterpret_cast<unsigned char*>(s.data()), n);
    return s;
  }

  [[noreturn]] void Fail(const std::string& what) {
    throw DataError("corrupt checkpoint: " + what, source_);
  }

 private:
  void Read(unsigned char* dst, std::size_t n) {
    in_.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) Fail("truncated");
  }

  std::istream& in_;
  const std::string& source_;
};

}  // namespace

void WriteCheckpoint(const ParamStore& params, std::ostream& out) {
  out.write("WCLB", 4);
  PutU32(out, kCheckpointVersion);
  PutU64(out, params.params().size());
  for (const auto& [name, t] : params.params()) {
    PutU32(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    const auto& ext = t.shape().extents();
    PutU32(out, static_cast<std::uint32_t>(ext.size()));
    for (Index e : ext) PutU64(out, static_cast<std::uint64_t>(e));
    const Matrix& v = t.value();
    for (Index i = 0; i < v.size(); ++i) {
      PutU64(out, std::bit_cast<std::uint64_t>(v.data()[i]));
    }
  }
  PutU64(out, params.meta().size());
  for (const auto& [key, value] : params.meta()) {
    PutU32(out, static_cast<std::uint32_t>(key.size()));
    out.write(key.data(), static_cast<std::streamsize>(key.size()));
    PutU64(out, value.size());
    out.write(value.data(), static_cast<std::streamsize>(value.size()));
  }
}

ParamStore ReadCheckpoint(std::istream& in, const std::string& source) {
  Reader r(in, source);
  if (r.Bytes(4) != "WCLB") r.Fail("bad magic");
  const std::uint32_t version = r.U32();
  if (version != kCheckpointVersion) {
    r.Fail("unsupported version " + std::to_string(version));
  }
  ParamStore out;
  const std::uint64_t count = r.U64();
  for (std::uint64_t k = 0; k < count; ++k) {
    std::string name = r.Bytes(r.U32());
    const std::uint32_t rank = r.U32();
    if (rank > 2) r.Fail("rank " + std::to_string(rank) + " for " + name);
    std::vector<Index> ext;
    for (std::uint32_t d = 0; d < rank; ++d) {
      const std::uint64_t e = r.U64();
      if (e == 0 || e > (1ull << 31)) r.Fail("bad extent for " + name);
      ext.push_back(static_cast<Index>(e));
    }
    Shape shape(ext);
    Matrix m(shape.rows(), shape.cols());
    for (Index i = 0; i < m.size(); ++i) {
      m.data()[i] = std::bit_cast<double>(r.U64());
    }
    out.Set(name, Tensor(shape, std::move(m), true));
  }
  const std::uint64_t metas = r.U64();
  for (std::uint64_t k = 0; k < metas; ++k) {
    std::string key = r.Bytes(r.U32());
    out.meta()[key] = r.Bytes(r.U64());
  }
  return out;
}

void SaveCheckpoint(const ParamStore& params,
                    const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open for writing", path.string());
  WriteCheckpoint(params, out);
  if (!out) throw DataError("write failed", path.string());
}

ParamStore LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint", path.string());
  return ReadCheckpoint(in, path.string());
}

std::string CheckpointBytes(const ParamStore& params) {
  std::ostringstream out(std::ios::binary);
  WriteCheckpoint(params, out);
  return out.str();
}

}  // namespace wclner
