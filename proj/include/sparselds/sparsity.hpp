#pragma once

#include <cstddef>
#include <initializer_list>
#include <iterator>
#include <variant>
#include <vector>

#include "sparselds/matrixcore.hpp"

namespace sparselds {

// Sorted, duplicate-free set of coordinate indices.
class SupportSet {
 public:
  SupportSet() = default;
  SupportSet(std::initializer_list<int> idx);
  explicit SupportSet(std::vector<int> idx);

  const std::vector<int>& indices() const noexcept { return idx_; }
  std::size_t size() const noexcept { return idx_.size(); }
  bool empty() const noexcept { return idx_.empty(); }
  bool contains(int i) const;
  bool is_subset_of(const SupportSet& other) const;
  int max_index() const { return idx_.empty() ? -1 : idx_.back(); }

  auto begin() const noexcept { return idx_.begin(); }
  auto end() const noexcept { return idx_.end(); }

  friend bool operator==(const SupportSet&, const SupportSet&) = default;
  friend auto operator<=>(const SupportSet&, const SupportSet&) = default;

 private:
  std::vector<int> idx_;
};

SupportSet set_union(const SupportSet& a, const SupportSet& b);

// Lexicographic enumeration of all k-subsets of {0..n-1}.
class CombinationIterator {
 public:
  using iterator_category = std::input_iterator_tag;
  using value_type = SupportSet;
  using difference_type = std::ptrdiff_t;
  using pointer = const SupportSet*;
  using reference = const SupportSet&;

  CombinationIterator() = default;  // end sentinel
  CombinationIterator(int n, int k);

  reference operator*() const { return current_; }
  pointer operator->() const { return &current_; }
  CombinationIterator& operator++();
  void operator++(int) { ++*this; }
  bool operator==(const CombinationIterator& o) const { return done_ == o.done_ && (done_ || current_ == o.current_); }

 private:
  int n_ = 0;
  std::vector<int> pos_;
  SupportSet current_;
  bool done_ = true;
};

struct CombinationRange {
  int n;
  int k;
  CombinationIterator begin() const { return {n, k}; }
  CombinationIterator end() const { return {}; }
};

unsigned long long binomial(int n, int k);

// Abstract simplicial complex over {0..m-1}, either all supports of size <= s
// or the downward closure of an explicit list of maximal faces.
class Asc {
 public:
  struct Uniform {
    int s;
  };
  struct Explicit {
    std::vector<SupportSet> maximal;
  };

  static Asc uniform(int ambient, int s);
  // Nested faces are dropped so only maximal ones are kept.
  static Asc explicit_faces(int ambient, std::vector<SupportSet> maximal);
  // The N-fold product complex with block k index i flattened to k*m + i.
  static Asc product(const Asc& base, int horizon);

  int ambient() const noexcept { return ambient_; }
  bool is_uniform() const noexcept { return std::holds_alternative<Uniform>(kind_); }
  int uniform_s() const { return std::get<Uniform>(kind_).s; }
  const std::vector<SupportSet>& explicit_maximal() const {
    return std::get<Explicit>(kind_).maximal;
  }

  bool is_face(const SupportSet& s) const;
  // Maximal faces in lexicographic order (materialized).
  std::vector<SupportSet> maximal_faces() const;
  std::size_t maximal_face_count() const;
  // Largest face cardinality.
  int max_face_size() const;
  // Maximal elements of { S ∪ S' : S, S' faces }.
  std::vector<SupportSet> maximal_pair_unions() const;

 private:
  Asc(int ambient, std::variant<Uniform, Explicit> kind) : ambient_(ambient), kind_(std::move(kind)) {}

  int ambient_;
  std::variant<Uniform, Explicit> kind_;
};

// One support per time step.
struct ProductSupport {
  std::vector<SupportSet> blocks;
  friend bool operator==(const ProductSupport&, const ProductSupport&) = default;
};

// Odometer over N-tuples of a face list; the last block varies fastest.
class ProductFaceIterator {
 public:
  ProductFaceIterator(std::vector<SupportSet> faces, int horizon);
  bool done() const noexcept { return done_; }
  const ProductSupport& current() const noexcept { return current_; }
  void advance();

 private:
  std::vector<SupportSet> faces_;
  std::vector<std::size_t> pos_;
  ProductSupport current_;
  bool done_ = false;
};

ProductFaceIterator product_faces(const Asc& base, int horizon);
SupportSet flatten(const ProductSupport& s, int m);
ProductSupport support_union(const ProductSupport& a, const ProductSupport& b);

// Copy of x with entries outside `s` zeroed.
Vector restrict(const Vector& x, const SupportSet& s);
// Sum of |x_i| over i in s.
double l1_on(const Vector& x, const SupportSet& s);

}  // namespace sparselds
