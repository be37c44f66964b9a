#include "whittlekf/words.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "whittlekf/errors.hpp"

namespace whittlekf {

Word::Word(std::string_view letters) : letters_(letters) {
  for (char c : letters_) {
    if (c != '0' && c != '1') {
      throw std::invalid_argument("word letter must be '0' or '1'");
    }
  }
}

std::size_t Word::ones() const {
  return static_cast<std::size_t>(std::count(letters_.begin(), letters_.end(), '1'));
}

Word Word::reversed() const {
  std::string r(letters_.rbegin(), letters_.rend());
  return Word(std::move(r), unchecked_t{});
}

bool Word::is_palindrome() const {
  return std::equal(letters_.begin(), letters_.begin() + static_cast<std::ptrdiff_t>(size() / 2),
                    letters_.rbegin());
}

Word Word::repeated(std::size_t n) const {
  std::string r;
  r.reserve(letters_.size() * n);
  for (std::size_t i = 0; i < n; ++i) r += letters_;
  return Word(std::move(r), unchecked_t{});
}

Word Word::prefix(std::size_t len) const {
  return Word(letters_.substr(0, len), unchecked_t{});
}

Word Word::suffix(std::size_t len) const {
  if (len > size()) len = size();
  return Word(letters_.substr(size() - len), unchecked_t{});
}

Word Word::rotated(std::size_t k) const {
  if (empty()) return *this;
  k %= size();
  return Word(letters_.substr(k) + letters_.substr(0, k), unchecked_t{});
}

std::size_t Word::factor_count(const Word& u) const {
  if (u.empty()) return size() + 1;
  if (u.size() > size()) return 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i + u.size() <= size(); ++i) {
    if (letters_.compare(i, u.size(), u.letters_) == 0) ++count;
  }
  return count;
}

Word Word::primitive_root() const {
  // Minimal period via the KMP failure function; the word is a power of its
  // minimal period iff the period length divides the word length.
  if (empty()) return *this;
  const std::size_t n = size();
  std::vector<std::size_t> fail(n, 0);
  for (std::size_t i = 1; i < n; ++i) {
    std::size_t k = fail[i - 1];
    while (k > 0 && letters_[i] != letters_[k]) k = fail[k - 1];
    if (letters_[i] == letters_[k]) ++k;
    fail[i] = k;
  }
  const std::size_t p = n - fail[n - 1];
  if (n % p == 0) return prefix(p);
  return *this;
}

Word operator+(const Word& a, const Word& b) {
  return Word(a.letters_ + b.letters_, Word::unchecked_t{});
}

OmegaWord::OmegaWord(Word preperiod, Word period) : pre_(std::move(preperiod)), per_(std::move(period)) {
  if (per_.empty()) throw std::invalid_argument("omega word needs a nonempty period");
}

ChristoffelNode christoffel_root() {
  ChristoffelNode n;
  n.left = Word::zero();
  n.right = Word::one();
  n.ones = 1;
  n.zeros = 1;
  return n;
}

std::pair<ChristoffelNode, ChristoffelNode> christoffel_children(const ChristoffelNode& node) {
  const Word uv = node.left + node.right;
  ChristoffelNode lo, hi;
  lo.left = node.left;
  lo.right = uv;
  lo.ones = static_cast<std::uint64_t>(lo.word().ones());
  lo.zeros = static_cast<std::uint64_t>(lo.word().zeros());
  hi.left = uv;
  hi.right = node.right;
  hi.ones = static_cast<std::uint64_t>(hi.word().ones());
  hi.zeros = static_cast<std::uint64_t>(hi.word().zeros());
  return {lo, hi};
}

std::vector<Word> enumerate_tree(int depth, const TreeLimits& limits) {
  if (depth < 0) throw std::invalid_argument("tree depth must be nonnegative");
  if (depth > limits.max_depth) throw resource_error("tree depth exceeds max_depth");
  // One expansion step inserts uv between each adjacent pair (u, v), so the
  // sequence after k steps holds every node word of the tree down to level
  // k-1 together with the fringe "0" and "1", already in slope order.
  std::vector<Word> seq{Word::zero(), Word::one()};
  std::size_t bytes = 2;
  for (int k = 0; k < depth; ++k) {
    if (seq.size() * 2 - 1 > limits.max_words) {
      throw resource_error("tree enumeration exceeds max_words");
    }
    std::vector<Word> next;
    next.reserve(seq.size() * 2 - 1);
    next.push_back(seq.front());
    for (std::size_t i = 1; i < seq.size(); ++i) {
      bytes += seq[i - 1].size() + seq[i].size();
      if (bytes > limits.max_bytes) throw resource_error("tree enumeration exceeds max_bytes");
      next.push_back(seq[i - 1] + seq[i]);
      next.push_back(seq[i]);
    }
    seq = std::move(next);
  }
  return seq;
}

Word christoffel_from_slope(std::uint64_t ones, std::uint64_t zeros) {
  if (ones == 0 && zeros == 0) throw std::invalid_argument("slope 0/0 is undefined");
  if (std::gcd(ones, zeros) > 1) {
    throw std::invalid_argument("christoffel slope must be in lowest terms");
  }
  // Lower mechanical word of slope ones/(ones+zeros), one full period:
  // letter k = floor((k+1) p / n) - floor(k p / n), k = 0..n-1, exact in
  // integer arithmetic.
  const std::uint64_t n = ones + zeros;
  WordBuilder b;
  for (std::uint64_t k = 0; k < n; ++k) {
    const std::uint64_t lo = (k * ones) / n;
    const std::uint64_t hi = ((k + 1) * ones) / n;
    b.push(static_cast<int>(hi - lo));
  }
  return b.take();
}

bool is_christoffel(const Word& w) {
  if (w.empty()) return false;
  const std::uint64_t p = w.ones();
  const std::uint64_t q = w.zeros();
  if (p == 0) return w.size() == 1;
  if (q == 0) return w.size() == 1;
  if (std::gcd(p, q) != 1) return false;
  return w == christoffel_from_slope(p, q);
}

Word apply_morphism(MorphismKind kind, unsigned p, const Word& w) {
  if (p < 1) throw std::invalid_argument("morphism parameter must be >= 1");
  WordBuilder b;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const int c = w[i];
    if (kind == MorphismKind::L) {
      const unsigned zeros = (c == 0) ? p + 1 : p;
      for (unsigned j = 0; j < zeros; ++j) b.push(0);
      b.push(1);
    } else {
      b.push(0);
      const unsigned ones = (c == 0) ? p : p + 1;
      for (unsigned j = 0; j < ones; ++j) b.push(1);
    }
  }
  return b.take();
}

Word sturmian_prefix(double alpha, std::size_t length) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("sturmian slope must lie in (0,1)");
  }
  WordBuilder b;
  double prev = 0.0;  // floor(0 * alpha)
  for (std::size_t t = 0; t < length; ++t) {
    const double cur = std::floor(static_cast<double>(t + 1) * alpha);
    b.push(cur - prev >= 1.0 ? 1 : 0);
    prev = cur;
  }
  return b.take();
}

std::optional<Word> christoffel_rotation(const Word& w) {
  if (w.empty()) return std::nullopt;
  const std::uint64_t p = w.ones();
  const std::uint64_t q = w.zeros();
  if (p != 0 && q != 0 && std::gcd(p, q) != 1) return std::nullopt;
  const Word target = (p == 0)   ? Word::zero()
                      : (q == 0) ? Word::one()
                                 : christoffel_from_slope(p, q);
  if (target.size() != w.size()) return std::nullopt;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (w.rotated(k) == target) return target;
  }
  return std::nullopt;
}

WordAlgebra word_algebra(const Word& w) {
  WordAlgebra a;
  a.word = w;
  a.reverse = w.reversed();
  a.is_palindrome = w.is_palindrome();
  return a;
}

}  // namespace whittlekf
