#include "sparselds/sparsity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sparselds/errors.hpp"

namespace sparselds {

SupportSet::SupportSet(std::initializer_list<int> idx) : SupportSet(std::vector<int>(idx)) {}

SupportSet::SupportSet(std::vector<int> idx) : idx_(std::move(idx)) {
  std::sort(idx_.begin(), idx_.end());
  idx_.erase(std::unique(idx_.begin(), idx_.end()), idx_.end());
  if (!idx_.empty() && idx_.front() < 0) throw DimensionError("negative support index");
}

bool SupportSet::contains(int i) const { return std::binary_search(idx_.begin(), idx_.end(), i); }

bool SupportSet::is_subset_of(const SupportSet& other) const {
  return std::includes(other.idx_.begin(), other.idx_.end(), idx_.begin(), idx_.end());
}

SupportSet set_union(const SupportSet& a, const SupportSet& b) {
  std::vector<int> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return SupportSet(std::move(out));
}

CombinationIterator::CombinationIterator(int n, int k) : n_(n), done_(k < 0 || k > n) {
  if (done_) return;
  pos_.resize(static_cast<std::size_t>(k));
  std::iota(pos_.begin(), pos_.end(), 0);
  current_ = SupportSet(pos_);
}

CombinationIterator& CombinationIterator::operator++() {
  const int k = static_cast<int>(pos_.size());
  int i = k - 1;
  while (i >= 0 && pos_[i] == n_ - k + i) --i;
  if (i < 0) {
    done_ = true;
    return *this;
  }
  ++pos_[i];
  for (int j = i + 1; j < k; ++j) pos_[j] = pos_[j - 1] + 1;
  current_ = SupportSet(pos_);
  return *this;
}

unsigned long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<unsigned long long>(n - k + i) / i;
  return r;
}

Asc Asc::uniform(int ambient, int s) {
  if (ambient < 0) throw DimensionError("negative ambient dimension");
  if (s < 0 || s > ambient) {
    throw DimensionError("uniform complex needs 0 <= s <= m, got s=" + std::to_string(s));
  }
  return Asc(ambient, Uniform{s});
}

Asc Asc::explicit_faces(int ambient, std::vector<SupportSet> maximal) {
  for (const auto& f : maximal) {
    if (f.max_index() >= ambient) throw DimensionError("face index exceeds ambient dimension");
  }
  std::sort(maximal.begin(), maximal.end());
  maximal.erase(std::unique(maximal.begin(), maximal.end()), maximal.end());
  std::vector<SupportSet> kept;
  for (std::size_t i = 0; i < maximal.size(); ++i) {
    bool nested = false;
    for (std::size_t j = 0; j < maximal.size() && !nested; ++j) {
      nested = i != j && maximal[i].size() < maximal[j].size() && maximal[i].is_subset_of(maximal[j]);
    }
    if (!nested) kept.push_back(maximal[i]);
  }
  return Asc(ambient, Explicit{std::move(kept)});
}

Asc Asc::product(const Asc& base, int horizon) {
  if (horizon < 1) throw DimensionError("product complex needs horizon >= 1");
  std::vector<SupportSet> faces;
  for (auto it = product_faces(base, horizon); !it.done(); it.advance()) {
    faces.push_back(flatten(it.current(), base.ambient()));
  }
  return Asc(base.ambient() * horizon, Explicit{std::move(faces)});
}

bool Asc::is_face(const SupportSet& s) const {
  if (s.max_index() >= ambient_) return false;
  if (const auto* u = std::get_if<Uniform>(&kind_)) {
    return static_cast<int>(s.size()) <= u->s;
  }
  const auto& faces = std::get<Explicit>(kind_).maximal;
  return s.empty() ||
         std::any_of(faces.begin(), faces.end(), [&](const SupportSet& f) { return s.is_subset_of(f); });
}

std::vector<SupportSet> Asc::maximal_faces() const {
  if (const auto* u = std::get_if<Uniform>(&kind_)) {
    std::vector<SupportSet> out;
    out.reserve(binomial(ambient_, u->s));
    for (const auto& f : CombinationRange{ambient_, u->s}) out.push_back(f);
    return out;
  }
  return std::get<Explicit>(kind_).maximal;
}

std::size_t Asc::maximal_face_count() const {
  if (const auto* u = std::get_if<Uniform>(&kind_)) return binomial(ambient_, u->s);
  return std::get<Explicit>(kind_).maximal.size();
}

int Asc::max_face_size() const {
  if (const auto* u = std::get_if<Uniform>(&kind_)) return u->s;
  std::size_t best = 0;
  for (const auto& f : std::get<Explicit>(kind_).maximal) best = std::max(best, f.size());
  return static_cast<int>(best);
}

std::vector<SupportSet> Asc::maximal_pair_unions() const {
  if (const auto* u = std::get_if<Uniform>(&kind_)) {
    return Asc::uniform(ambient_, std::min(2 * u->s, ambient_)).maximal_faces();
  }
  const auto& faces = std::get<Explicit>(kind_).maximal;
  std::vector<SupportSet> unions;
  for (std::size_t i = 0; i < faces.size(); ++i) {
    for (std::size_t j = i; j < faces.size(); ++j) unions.push_back(set_union(faces[i], faces[j]));
  }
  return Asc::explicit_faces(ambient_, std::move(unions)).explicit_maximal();
}

ProductFaceIterator::ProductFaceIterator(std::vector<SupportSet> faces, int horizon)
    : faces_(std::move(faces)), pos_(static_cast<std::size_t>(horizon), 0) {
  done_ = faces_.empty() || horizon < 1;
  if (done_) return;
  current_.blocks.assign(pos_.size(), faces_.front());
}

void ProductFaceIterator::advance() {
  if (done_) return;
  std::size_t k = pos_.size();
  while (k > 0) {
    --k;
    if (++pos_[k] < faces_.size()) {
      current_.blocks[k] = faces_[pos_[k]];
      return;
    }
    pos_[k] = 0;
    current_.blocks[k] = faces_.front();
  }
  done_ = true;
}

ProductFaceIterator product_faces(const Asc& base, int horizon) {
  return ProductFaceIterator(base.maximal_faces(), horizon);
}

SupportSet flatten(const ProductSupport& s, int m) {
  std::vector<int> out;
  for (std::size_t k = 0; k < s.blocks.size(); ++k) {
    for (int i : s.blocks[k]) {
      if (i >= m) throw DimensionError("block support index exceeds m");
      out.push_back(static_cast<int>(k) * m + i);
    }
  }
  return SupportSet(std::move(out));
}

ProductSupport support_union(const ProductSupport& a, const ProductSupport& b) {
  if (a.blocks.size() != b.blocks.size()) throw DimensionError("support_union: horizon mismatch");
  ProductSupport out;
  out.blocks.reserve(a.blocks.size());
  for (std::size_t k = 0; k < a.blocks.size(); ++k) out.blocks.push_back(set_union(a.blocks[k], b.blocks[k]));
  return out;
}

Vector restrict(const Vector& x, const SupportSet& s) {
  Vector out = Vector::Zero(x.size());
  for (int i : s) {
    if (i >= x.size()) throw DimensionError("restrict: index out of range");
    out(i) = x(i);
  }
  return out;
}

double l1_on(const Vector& x, const SupportSet& s) {
  double acc = 0.0;
  for (int i : s) acc += std::abs(x(i));
  return acc;
}

}  // namespace sparselds
