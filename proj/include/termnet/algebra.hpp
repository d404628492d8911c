#pragma once

// Finite algebraic structures on {0, ..., q-1} given by operation tables.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "termnet/errors.hpp"

namespace termnet {

enum class AlgebraKind {
  prime_field,
  prime_power_field,
  modular_ring,
  vector_space,  // F_2^m under xor; matrices act on bit vectors
  finite_group,
};

inline std::string to_string(AlgebraKind k) {
  switch (k) {
    case AlgebraKind::prime_field: return "prime_field";
    case AlgebraKind::prime_power_field: return "prime_power_field";
    case AlgebraKind::modular_ring: return "modular_ring";
    case AlgebraKind::vector_space: return "vector_space";
    case AlgebraKind::finite_group: return "finite_group";
  }
  return "?";
}

inline bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

using OpTable = std::vector<std::vector<int>>;

class AlgebraSpec {
 public:
  static AlgebraSpec prime_field(int p) {
    if (!is_prime(p)) throw PreconditionError(std::to_string(p) + " is not prime");
    auto a = modular(p);
    a.kind_ = AlgebraKind::prime_field;
    a.name_ = "F" + std::to_string(p);
    return a;
  }

  static AlgebraSpec modular_ring(int n) {
    if (n < 2) throw PreconditionError("Z_n needs n >= 2");
    auto a = modular(n);
    a.kind_ = AlgebraKind::modular_ring;
    a.name_ = "Z" + std::to_string(n);
    return a;
  }

  // Field from explicit tables; 0 and 1 must be the additive and
  // multiplicative identities.
  static AlgebraSpec field_from_tables(OpTable add, OpTable mul, std::string name = "") {
    AlgebraSpec a;
    a.kind_ = AlgebraKind::prime_power_field;
    a.q_ = static_cast<int>(add.size());
    a.add_ = std::move(add);
    a.mul_ = std::move(mul);
    a.name_ = name.empty() ? "F" + std::to_string(a.q_) : std::move(name);
    a.validate_field();
    return a;
  }

  // GF(2^m) in the polynomial basis, elements as bit vectors.
  static AlgebraSpec gf2m(int m) {
    static const int kModulus[] = {0, 0b11, 0b111, 0b1011, 0b10011, 0b100101,
                                   0b1000011, 0b10000011, 0b100011011};
    if (m < 1 || m > 8) throw PreconditionError("GF(2^m) supported for 1 <= m <= 8");
    const int q = 1 << m;
    OpTable add(q, std::vector<int>(q)), mul(q, std::vector<int>(q));
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < q; ++b) {
        add[a][b] = a ^ b;
        int x = a, y = b, r = 0;
        while (y) {
          if (y & 1) r ^= x;
          y >>= 1;
          x <<= 1;
          if (x & q) x ^= kModulus[m];
        }
        mul[a][b] = r;
      }
    return field_from_tables(std::move(add), std::move(mul), "GF" + std::to_string(q));
  }

  static AlgebraSpec f4() { return gf2m(2); }

  static AlgebraSpec vector_space_f2(int m) {
    if (m < 1 || m > 8) throw PreconditionError("F_2^m supported for 1 <= m <= 8");
    AlgebraSpec a;
    a.kind_ = AlgebraKind::vector_space;
    a.q_ = 1 << m;
    a.dimension_ = m;
    a.add_.assign(a.q_, std::vector<int>(a.q_));
    for (int x = 0; x < a.q_; ++x)
      for (int y = 0; y < a.q_; ++y) a.add_[x][y] = x ^ y;
    a.name_ = "F2^" + std::to_string(m);
    return a;
  }

  static AlgebraSpec group_from_table(OpTable op, std::string name = "") {
    AlgebraSpec a;
    a.kind_ = AlgebraKind::finite_group;
    a.q_ = static_cast<int>(op.size());
    a.add_ = std::move(op);
    a.name_ = name.empty() ? "G" + std::to_string(a.q_) : std::move(name);
    a.validate_group();
    return a;
  }

  static AlgebraSpec cyclic_group(int n) {
    OpTable op(n, std::vector<int>(n));
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) op[a][b] = (a + b) % n;
    return group_from_table(std::move(op), "C" + std::to_string(n));
  }

  // S3 as permutations of {0,1,2} in lexicographic order; element 0 is the
  // identity and (a*b)(i) = a(b(i)).
  static AlgebraSpec symmetric_group_s3() {
    const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                             {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    OpTable op(6, std::vector<int>(6));
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) {
        int c[3];
        for (int i = 0; i < 3; ++i) c[i] = perms[a][perms[b][i]];
        for (int r = 0; r < 6; ++r)
          if (c[0] == perms[r][0] && c[1] == perms[r][1] && c[2] == perms[r][2])
            op[a][b] = r;
      }
    return group_from_table(std::move(op), "S3");
  }

  AlgebraKind kind() const noexcept { return kind_; }
  int size() const noexcept { return q_; }
  int dimension() const noexcept { return dimension_; }
  const std::string& name() const noexcept { return name_; }
  bool is_field() const noexcept {
    return kind_ == AlgebraKind::prime_field || kind_ == AlgebraKind::prime_power_field;
  }
  bool has_multiplication() const noexcept { return !mul_.empty(); }

  int add(int a, int b) const { return add_[a][b]; }
  int mul(int a, int b) const {
    if (mul_.empty()) throw PreconditionError(name_ + " has no multiplication");
    return mul_[a][b];
  }
  int op(int a, int b) const { return add_[a][b]; }  // group operation
  int neg(int a) const {
    for (int b = 0; b < q_; ++b)
      if (add_[a][b] == 0) return b;
    throw PreconditionError("no additive inverse");
  }
  int sub(int a, int b) const { return add(a, neg(b)); }
  int pow(int a, std::uint64_t e) const {
    int r = 1;
    for (std::uint64_t i = 0; i < e; ++i) r = mul(r, a);
    return r;
  }
  std::optional<int> inverse(int a) const {
    for (int b = 0; b < q_; ++b)
      if (mul(a, b) == 1) return b;
    return std::nullopt;
  }

  // Matrix (row bitmasks, row i gives output bit i) applied to a bit vector.
  int apply_matrix(const std::vector<int>& rows, int v) const {
    int out = 0;
    for (int i = 0; i < dimension_; ++i)
      if (__builtin_popcount(rows[i] & v) & 1) out |= 1 << i;
    return out;
  }

  const OpTable& add_table() const noexcept { return add_; }
  const OpTable& mul_table() const noexcept { return mul_; }

 private:
  static AlgebraSpec modular(int n) {
    AlgebraSpec a;
    a.q_ = n;
    a.add_.assign(n, std::vector<int>(n));
    a.mul_.assign(n, std::vector<int>(n));
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) {
        a.add_[x][y] = (x + y) % n;
        a.mul_[x][y] = (x * y) % n;
      }
    return a;
  }

  static void check_square(const OpTable& t, int q, const std::string& what) {
    if (static_cast<int>(t.size()) != q) throw PreconditionError(what + " table is not q x q");
    for (const auto& row : t) {
      if (static_cast<int>(row.size()) != q)
        throw PreconditionError(what + " table is not q x q");
      for (int v : row)
        if (v < 0 || v >= q) throw PreconditionError(what + " table leaves the set");
    }
  }

  static bool associative(const OpTable& t) {
    const int q = static_cast<int>(t.size());
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < q; ++b)
        for (int c = 0; c < q; ++c)
          if (t[t[a][b]][c] != t[a][t[b][c]]) return false;
    return true;
  }

  void validate_group() const {
    if (q_ < 1) throw PreconditionError("empty group");
    check_square(add_, q_, "group");
    if (!associative(add_)) throw PreconditionError(name_ + " is not associative");
    int e = -1;
    for (int c = 0; c < q_ && e < 0; ++c) {
      bool ok = true;
      for (int a = 0; a < q_ && ok; ++a) ok = add_[c][a] == a && add_[a][c] == a;
      if (ok) e = c;
    }
    if (e < 0) throw PreconditionError(name_ + " has no identity");
    for (int a = 0; a < q_; ++a) {
      bool found = false;
      for (int b = 0; b < q_ && !found; ++b) found = add_[a][b] == e && add_[b][a] == e;
      if (!found) throw PreconditionError(name_ + " lacks inverses");
    }
  }

  void validate_field() const {
    if (q_ < 2) throw PreconditionError("a field has at least 2 elements");
    check_square(add_, q_, "addition");
    check_square(mul_, q_, "multiplication");
    for (int a = 0; a < q_; ++a)
      for (int b = 0; b < q_; ++b) {
        if (add_[a][b] != add_[b][a] || mul_[a][b] != mul_[b][a])
          throw PreconditionError(name_ + " is not commutative");
        for (int c = 0; c < q_; ++c)
          if (mul_[a][add_[b][c]] != add_[mul_[a][b]][mul_[a][c]])
            throw PreconditionError(name_ + " is not distributive");
      }
    if (!associative(add_) || !associative(mul_))
      throw PreconditionError(name_ + " is not associative");
    for (int a = 0; a < q_; ++a) {
      if (add_[0][a] != a || mul_[1][a] != a)
        throw PreconditionError(name_ + ": 0 and 1 must be the identities");
      bool neg = false, inv = a == 0;
      for (int b = 0; b < q_; ++b) {
        neg = neg || add_[a][b] == 0;
        inv = inv || mul_[a][b] == 1;
      }
      if (!neg || !inv) throw PreconditionError(name_ + " lacks inverses");
    }
  }

  AlgebraKind kind_ = AlgebraKind::prime_field;
  int q_ = 0;
  int dimension_ = 0;
  std::string name_;
  OpTable add_;
  OpTable mul_;
};

}  // namespace termnet
