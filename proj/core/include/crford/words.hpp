#pragma once

#include "crford/certificate.hpp"
#include "crford/triangle.hpp"

#include <string>
#include <utility>
#include <vector>

namespace crford {

// Freely reduced word in the reflection letters 1,2,3; each letter is an
// involution, so reduction just cancels adjacent equal letters and the
// inverse is the reversal.
struct Word {
    std::vector<int> letters;

    static Word reduce(std::vector<int> raw);
    static Word parse(const std::string& digits);  // e.g. "2313"

    std::string str() const;
    bool even() const { return letters.size() % 2 == 0; }
    Word operator*(const Word& o) const;
    Word inverse() const;
    Word pow(int k) const;
    bool operator==(const Word& o) const { return letters == o.letters; }
};

// Product I_{l1} I_{l2} ... in left-to-right order.
Mat evaluate(const Word& w, const TriangleGroup& g);

// Freely reduced word over abstract generators: signed 1-based indices,
// -k meaning the inverse of generator k.
struct AbsWord {
    std::vector<int> syms;

    AbsWord() = default;
    AbsWord(std::initializer_list<int> v);
    explicit AbsWord(std::vector<int> v);

    AbsWord operator*(const AbsWord& o) const;
    AbsWord inverse() const;
    AbsWord pow(int k) const;
    bool operator==(const AbsWord& o) const { return syms == o.syms; }
    std::string str(const std::vector<std::string>& gens) const;
};

// u v u^-1 v^-1
AbsWord commutator(const AbsWord& u, const AbsWord& v);

struct Presentation {
    std::string name;
    std::vector<std::string> generators;
    std::vector<AbsWord> relators;
    std::vector<std::pair<AbsWord, AbsWord>> peripheral;
};

// name in {m004, m009, m015, m009_snappy}
Presentation builtin_presentation(const std::string& name);

// Text format: "generators: x y", then "relator: <word>" and
// "peripheral: <word> ; <word>" lines; a word is factors like x, y^-1, x^3
// separated by spaces.  '#' starts a comment.
Presentation parse_presentation(const std::string& text);
std::string presentation_text(const Presentation& p);

// Generator images are triangle words (word_images) or explicit matrices
// (matrix_images); exactly one of the two should be populated.
struct GroupHom {
    Presentation source;
    std::vector<Word> word_images;
    std::vector<Mat> matrix_images;
};

// Image of an abstract word under explicit generator matrices.
Mat abs_image(const std::vector<Mat>& gens, const AbsWord& w);

// Image of an abstract word; g supplies the reflection matrices for word
// images and is ignored for matrix images.
Mat hom_image(const GroupHom& h, const AbsWord& w, const TriangleGroup& g);

// One witness entry per relator: the exact scalar lambda (lambda^dim = 1)
// with relator image = lambda * identity.  Pass iff every relator is scalar.
Certificate verify_homomorphism(const GroupHom& h, const TriangleGroup& g);

// Exact peripheral images, unipotency flags, and a bounded search for a
// common generator: u = g^m, v = g^n with |m|,|n| <= exponent_bound.
Certificate peripheral_analysis(const GroupHom& h, const TriangleGroup& g,
                                int exponent_bound = 6);

// Freely reduced even words up to max_len, one representative per projective
// class, in shortlex order.
std::vector<std::pair<Word, Mat>> enumerate_even_words(const TriangleGroup& g, int max_len);

// Exact string key identifying the projective class of a matrix (entries
// normalized by the first nonzero one).
std::string projective_key(const Mat& m);

// Bounded search (products of generator images, length <= search_len) for
// words expressing 12 and 23 in both image groups; Pass shows both images
// equal the even subgroup, Undecided when the search is exhausted.
Certificate conjugacy_witness(const GroupHom& h1, const GroupHom& h2, const TriangleGroup& g,
                              int search_len = 8);

}  // namespace crford
