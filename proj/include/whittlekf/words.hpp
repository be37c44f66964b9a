#pragma once

//---------------------------------------------------------------------------
// Binary words and the Christoffel tree.
//
// Words are finite strings over {0,1}. A Christoffel word of slope p/q
// (p ones, q zeros, gcd(p,q) = 1) is the lower mechanical word produced by
// the floor formula; every such word other than "0" and "1" factors as
// 0 w 1 with w a palindrome. The tree is rooted at the pair ("0","1") and
// the two children of a pair (u, v) are (u, uv) and (uv, v); the node word
// is the concatenation uv.
//---------------------------------------------------------------------------

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace whittlekf {

class Word {
 public:
  Word() = default;
  // Validates that every letter is '0' or '1'; throws std::invalid_argument.
  explicit Word(std::string_view letters);

  static Word zero() { return Word("0"); }
  static Word one() { return Word("1"); }

  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  const std::string& str() const { return letters_; }

  // 0-based letter access, returns 0 or 1.
  int operator[](std::size_t i) const { return letters_[i] - '0'; }

  std::size_t ones() const;
  std::size_t zeros() const { return size() - ones(); }

  Word reversed() const;
  bool is_palindrome() const;
  Word repeated(std::size_t n) const;
  Word prefix(std::size_t len) const;
  Word suffix(std::size_t len) const;
  Word rotated(std::size_t k) const;  // left rotation by k letters

  // Number of occurrences of u as a factor, overlaps counted. |w|_u.
  // The empty factor occurs size()+1 times by convention.
  std::size_t factor_count(const Word& u) const;

  // Shortest u with *this == u^k. Equals *this when primitive.
  Word primitive_root() const;

  friend Word operator+(const Word& a, const Word& b);
  friend bool operator==(const Word& a, const Word& b) { return a.letters_ == b.letters_; }
  friend bool operator!=(const Word& a, const Word& b) { return a.letters_ != b.letters_; }
  friend bool operator<(const Word& a, const Word& b) { return a.letters_ < b.letters_; }

 private:
  struct unchecked_t {};
  Word(std::string letters, unchecked_t) : letters_(std::move(letters)) {}
  std::string letters_;

  friend class WordBuilder;
};

// Append-only builder that skips per-letter validation.
class WordBuilder {
 public:
  void push(int letter) { letters_.push_back(letter ? '1' : '0'); }
  void append(const Word& w) { letters_ += w.str(); }
  std::size_t size() const { return letters_.size(); }
  Word take() { return Word(std::move(letters_), Word::unchecked_t{}); }

 private:
  std::string letters_;
};

// One-sided infinite word with an eventually periodic description:
// preperiod followed by period repeated forever. period must be nonempty.
class OmegaWord {
 public:
  OmegaWord(Word preperiod, Word period);

  int letter(std::size_t t) const {
    return t < pre_.size() ? pre_[t] : per_[(t - pre_.size()) % per_.size()];
  }
  const Word& preperiod() const { return pre_; }
  const Word& period() const { return per_; }

 private:
  Word pre_, per_;
};

// Node of the Christoffel tree. The node word is left + right; its slope,
// ones over zeros, is stored in lowest terms (it is automatically coprime).
struct ChristoffelNode {
  Word left, right;
  std::uint64_t ones = 1, zeros = 1;

  Word word() const { return left + right; }
};

ChristoffelNode christoffel_root();
// Children of (u,v): first = (u, uv) (smaller slope), second = (uv, v).
std::pair<ChristoffelNode, ChristoffelNode> christoffel_children(const ChristoffelNode& node);

struct TreeLimits {
  int max_depth = 24;
  std::size_t max_words = std::size_t{1} << 20;
  std::size_t max_bytes = std::size_t{256} << 20;
};

// All node words of the tree truncated at the given depth, ordered by
// increasing slope: depth 0 gives ("0","1"), depth k has 2^k + 1 words.
// Exceeding a limit throws resource_error.
std::vector<Word> enumerate_tree(int depth, const TreeLimits& limits = {});

// Lower Christoffel word with ones ones and zeros zeros via the floor
// formula; requires gcd(ones, zeros) = 1, else std::invalid_argument.
// christoffel_from_slope(1, 1) == "01"; (0,1) == "0"; (1,0) == "1".
Word christoffel_from_slope(std::uint64_t ones, std::uint64_t zeros);

// True iff w is a Christoffel word (a node word of the tree).
bool is_christoffel(const Word& w);

enum class MorphismKind { L, R };

// L_p: 0 -> 0^{p+1} 1, 1 -> 0^p 1.  R_p: 0 -> 0 1^p, 1 -> 0 1^{p+1}.
// Requires p >= 1. Both send Christoffel words to Christoffel words.
Word apply_morphism(MorphismKind kind, unsigned p, const Word& w);

// Length-`length` prefix of the lower mechanical word of slope alpha:
// letter t = floor((t+1) alpha) - floor(t alpha), t >= 0. alpha in (0,1).
Word sturmian_prefix(double alpha, std::size_t length);

// Rotation of a primitive word that is a Christoffel word, if one exists.
std::optional<Word> christoffel_rotation(const Word& w);

struct WordAlgebra {
  Word word;
  Word reverse;
  bool is_palindrome = false;

  std::size_t factor_count(const Word& u) const { return word.factor_count(u); }
};

WordAlgebra word_algebra(const Word& w);

}  // namespace whittlekf
