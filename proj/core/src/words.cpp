#include "crford/words.hpp"

#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace crford {

Word Word::reduce(std::vector<int> raw) {
    Word w;
    for (int l : raw) {
        if (!w.letters.empty() && w.letters.back() == l)
            w.letters.pop_back();
        else
            w.letters.push_back(l);
    }
    return w;
}

Word Word::parse(const std::string& digits) {
    std::vector<int> raw;
    for (char c : digits) {
        if (c < '1' || c > '3') throw Error("bad triangle word letter: " + std::string(1, c));
        raw.push_back(c - '0');
    }
    return reduce(std::move(raw));
}

std::string Word::str() const {
    std::string s;
    for (int l : letters) s += static_cast<char>('0' + l);
    return s.empty() ? "e" : s;
}

Word Word::operator*(const Word& o) const {
    std::vector<int> raw = letters;
    raw.insert(raw.end(), o.letters.begin(), o.letters.end());
    return reduce(std::move(raw));
}

Word Word::inverse() const {
    Word w;
    w.letters.assign(letters.rbegin(), letters.rend());
    return w;
}

Word Word::pow(int k) const {
    Word base = k < 0 ? inverse() : *this;
    if (k < 0) k = -k;
    Word out;
    for (int i = 0; i < k; ++i) out = out * base;
    return out;
}

Mat evaluate(const Word& w, const TriangleGroup& g) {
    Mat m = Mat::identity(3, g.field);
    for (int l : w.letters) m = m * (l == 1 ? g.I1 : l == 2 ? g.I2 : g.I3);
    return m;
}

namespace {
std::vector<int> free_reduce(std::vector<int> raw) {
    std::vector<int> out;
    for (int s : raw) {
        if (!out.empty() && out.back() == -s)
            out.pop_back();
        else
            out.push_back(s);
    }
    return out;
}
}  // namespace

AbsWord::AbsWord(std::initializer_list<int> v) : syms(free_reduce(std::vector<int>(v))) {}
AbsWord::AbsWord(std::vector<int> v) : syms(free_reduce(std::move(v))) {}

AbsWord AbsWord::operator*(const AbsWord& o) const {
    std::vector<int> raw = syms;
    raw.insert(raw.end(), o.syms.begin(), o.syms.end());
    return AbsWord(std::move(raw));
}

AbsWord AbsWord::inverse() const {
    std::vector<int> raw;
    for (auto it = syms.rbegin(); it != syms.rend(); ++it) raw.push_back(-*it);
    return AbsWord(std::move(raw));
}

AbsWord AbsWord::pow(int k) const {
    AbsWord base = k < 0 ? inverse() : *this;
    if (k < 0) k = -k;
    AbsWord out;
    for (int i = 0; i < k; ++i) out = out * base;
    return out;
}

std::string AbsWord::str(const std::vector<std::string>& gens) const {
    if (syms.empty()) return "1";
    std::ostringstream out;
    size_t i = 0;
    while (i < syms.size()) {
        size_t j = i;
        while (j < syms.size() && syms[j] == syms[i]) ++j;
        int e = static_cast<int>(j - i) * (syms[i] > 0 ? 1 : -1);
        if (i) out << ' ';
        out << gens.at(std::abs(syms[i]) - 1);
        if (e != 1) out << '^' << e;
        i = j;
    }
    return out.str();
}

AbsWord commutator(const AbsWord& u, const AbsWord& v) {
    return u * v * u.inverse() * v.inverse();
}

Presentation builtin_presentation(const std::string& name) {
    if (name == "m004") {
        AbsWord x{1}, y{2};
        return {name,
                {"x", "y"},
                {x * commutator(x, y) * commutator(y.inverse(), x.inverse())},
                {{x * y, commutator(x, y.inverse()) * commutator(x.inverse(), y.inverse())}}};
    }
    if (name == "m009") {
        AbsWord a{1}, d{2};
        return {name,
                {"a", "d"},
                {a * a * commutator(a, d) * commutator(a, d.inverse())},
                {{commutator(d.inverse(), a) * d,
                  d.inverse() * a * commutator(a, d.inverse()) * a.inverse()}}};
    }
    if (name == "m015") {
        AbsWord a{1}, b{2};
        // relator from b = a b^2 a^-1 [b^-2, a^-1]
        return {name,
                {"a", "b"},
                {b.inverse() * a * b.pow(2) * a.inverse() *
                 commutator(b.pow(-2), a.inverse())},
                {{b.inverse() * a.inverse() * b,
                  b.pow(-3) * a.inverse() * b.pow(3) * a.inverse() * b.inverse()}}};
    }
    if (name == "m009_geo") {
        AbsWord x{1}, y{2};
        return {name,
                {"x", "y"},
                {x * commutator(x, y) * x * commutator(x, y.inverse())},
                {{x * y,
                  x.inverse() * y.inverse() * x.pow(3) * y.inverse() * x.inverse() * y}}};
    }
    if (name == "m015_geo") {
        AbsWord x{1}, y{2};
        AbsWord xy = x * y;
        return {name,
                {"x", "y"},
                {commutator(x, y.inverse()) * x.pow(3) * commutator(y, x.inverse()) * y.pow(2)},
                {{xy,
                  xy.pow(2) * commutator(x, y.inverse()) * x * commutator(y.inverse(), x) *
                      y.inverse() * xy}}};
    }
    if (name == "m009_snappy") {
        AbsWord a{1}, b{2}, c{3}, d{4};
        return {name,
                {"a", "b", "c", "d"},
                {b * a * c * b.inverse() * d.inverse(), c * d.inverse() * a.inverse(),
                 c * a.inverse() * b * d.inverse()},
                {{b.inverse() * a * d * c.inverse() * d,
                  d.inverse() * c * d.inverse() * b * c.inverse() * d * b.inverse()}}};
    }
    throw Error("unknown presentation: " + name);
}

namespace {

std::string trimmed(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

AbsWord parse_word(const std::string& text, const std::vector<std::string>& gens) {
    std::istringstream in(text);
    std::string tok;
    std::vector<int> syms;
    while (in >> tok) {
        std::string name = tok;
        int exp = 1;
        if (auto caret = tok.find('^'); caret != std::string::npos) {
            name = tok.substr(0, caret);
            exp = std::stoi(tok.substr(caret + 1));
        }
        int idx = -1;
        for (size_t i = 0; i < gens.size(); ++i)
            if (gens[i] == name) idx = static_cast<int>(i) + 1;
        if (idx < 0) throw Error("unknown generator in word: " + name);
        for (int i = 0; i < std::abs(exp); ++i) syms.push_back(exp > 0 ? idx : -idx);
    }
    return AbsWord(std::move(syms));
}

}  // namespace

Presentation parse_presentation(const std::string& text) {
    Presentation p;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        line = trimmed(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        auto colon = line.find(':');
        if (colon == std::string::npos) throw Error("bad presentation line: " + line);
        std::string key = trimmed(line.substr(0, colon));
        std::string val = trimmed(line.substr(colon + 1));
        if (key == "name") {
            p.name = val;
        } else if (key == "generators") {
            std::istringstream gs(val);
            std::string g;
            while (gs >> g) p.generators.push_back(g);
        } else if (key == "relator") {
            p.relators.push_back(parse_word(val, p.generators));
        } else if (key == "peripheral") {
            auto semi = val.find(';');
            if (semi == std::string::npos) throw Error("peripheral line needs two words: " + line);
            p.peripheral.emplace_back(parse_word(val.substr(0, semi), p.generators),
                                      parse_word(val.substr(semi + 1), p.generators));
        } else {
            throw Error("bad presentation key: " + key);
        }
    }
    if (p.relators.empty()) throw Error("presentation has no relators");
    return p;
}

std::string presentation_text(const Presentation& p) {
    std::ostringstream out;
    if (!p.name.empty()) out << "name: " << p.name << "\n";
    out << "generators:";
    for (const auto& g : p.generators) out << ' ' << g;
    out << "\n";
    for (const auto& r : p.relators) out << "relator: " << r.str(p.generators) << "\n";
    for (const auto& [u, v] : p.peripheral)
        out << "peripheral: " << u.str(p.generators) << " ; " << v.str(p.generators) << "\n";
    return out.str();
}

Mat abs_image(const std::vector<Mat>& gens, const AbsWord& w) {
    if (gens.empty()) throw Error("abs_image: no generator matrices");
    Mat m = Mat::identity(gens[0].dim(), gens[0].field());
    for (int s : w.syms) {
        const Mat& img = gens.at(std::abs(s) - 1);
        m = m * (s > 0 ? img : img.inverse());
    }
    return m;
}

Mat hom_image(const GroupHom& h, const AbsWord& w, const TriangleGroup& g) {
    if (!h.word_images.empty()) {
        Word total;
        for (int s : w.syms) {
            const Word& img = h.word_images.at(std::abs(s) - 1);
            total = total * (s > 0 ? img : img.inverse());
        }
        return evaluate(total, g);
    }
    if (h.matrix_images.empty()) throw Error("homomorphism has no generator images");
    Mat m = Mat::identity(h.matrix_images[0].dim(), h.matrix_images[0].field());
    for (int s : w.syms) {
        const Mat& img = h.matrix_images.at(std::abs(s) - 1);
        m = m * (s > 0 ? img : img.inverse());
    }
    return m;
}

Certificate verify_homomorphism(const GroupHom& h, const TriangleGroup& g) {
    Certificate cert;
    cert.claim = "relators_map_to_projective_identity:" + h.source.name;
    auto images = nlohmann::json::array();
    for (size_t i = 0; i < h.source.generators.size(); ++i) {
        if (!h.word_images.empty())
            images.push_back({{"generator", h.source.generators[i]},
                              {"word", h.word_images.at(i).str()}});
        else
            images.push_back({{"generator", h.source.generators[i]},
                              {"matrix", mat_json(h.matrix_images.at(i))}});
    }
    cert.inputs = {{"presentation", h.source.name}, {"images", images}};
    bool all_pass = true;
    auto rows = nlohmann::json::array();
    for (const auto& rel : h.source.relators) {
        Mat m = hom_image(h, rel, g);
        nlohmann::json row{{"relator", rel.str(h.source.generators)}};
        bool ok = m.is_scalar();
        if (ok) {
            NFElem lambda = m.at(0, 0);
            ok = (lambda.pow(static_cast<long>(m.dim())) - Rat(1)).is_zero();
            row["scalar"] = elem_json(lambda);
        } else {
            row["scalar"] = nullptr;
        }
        row["pass"] = ok;
        all_pass = all_pass && ok;
        rows.push_back(row);
    }
    cert.witness = {{"relators", rows}};
    cert.status = all_pass ? Certificate::Status::Pass : Certificate::Status::Fail;
    return cert;
}

std::string projective_key(const Mat& m) {
    NFElem scale;
    for (size_t i = 0; i < m.dim() * m.dim() && scale.is_zero(); ++i)
        scale = m.at(i / m.dim(), i % m.dim());
    NFElem inv = scale.inverse();
    std::string key = std::to_string(m.dim());
    for (size_t i = 0; i < m.dim(); ++i)
        for (size_t j = 0; j < m.dim(); ++j) {
            key += '|';
            NFElem scaled = m.at(i, j) * inv;
            for (const auto& c : scaled.coeffs()) {
                key += rat_str(c);
                key += ',';
            }
        }
    return key;
}

Certificate peripheral_analysis(const GroupHom& h, const TriangleGroup& g, int exponent_bound) {
    Certificate cert;
    cert.claim = "peripheral_holonomy_cyclic_unipotent:" + h.source.name;
    cert.inputs = {{"presentation", h.source.name}, {"exponent_bound", exponent_bound}};
    auto rows = nlohmann::json::array();
    bool any_fail = false, any_undecided = false;
    for (const auto& [u, v] : h.source.peripheral) {
        Mat mu = hom_image(h, u, g);
        Mat mv = hom_image(h, v, g);
        nlohmann::json row{{"u", u.str(h.source.generators)},
                           {"v", v.str(h.source.generators)},
                           {"u_matrix", mat_json(mu)},
                           {"v_matrix", mat_json(mv)},
                           {"u_unipotent", mu.dim() == 3 && is_unipotent(mu)},
                           {"v_unipotent", mv.dim() == 3 && is_unipotent(mv)}};
        if (mu.is_identity() && mv.is_identity()) {
            row["degenerate"] = true;
            row["cyclic_unipotent"] = false;
            any_fail = true;
            rows.push_back(row);
            continue;
        }
        std::vector<Mat> candidates{mu, mv, mu * mv, mu * mv.inverse(), mv * mu.inverse()};
        bool found = false;
        for (const Mat& cand : candidates) {
            if (cand.is_identity()) continue;
            std::map<std::string, int> powers;
            Mat p = Mat::identity(cand.dim(), cand.field());
            Mat ci = cand.inverse();
            Mat q = p;
            powers[projective_key(p)] = 0;
            for (int k = 1; k <= exponent_bound; ++k) {
                p = p * cand;
                q = q * ci;
                powers.emplace(projective_key(p), k);
                powers.emplace(projective_key(q), -k);
            }
            auto iu = powers.find(projective_key(mu));
            auto iv = powers.find(projective_key(mv));
            if (iu == powers.end() || iv == powers.end()) continue;
            bool unip = cand.dim() == 3 && is_unipotent(cand);
            row["generator"] = mat_json(cand);
            row["u_exponent"] = iu->second;
            row["v_exponent"] = iv->second;
            row["cyclic_unipotent"] = unip;
            found = true;
            if (!unip) any_fail = true;
            break;
        }
        if (!found) {
            row["cyclic_unipotent"] = false;
            any_undecided = true;
        }
        rows.push_back(row);
    }
    cert.witness = {{"peripheral", rows}};
    cert.status = any_fail       ? Certificate::Status::Fail
                  : any_undecided ? Certificate::Status::Undecided
                                  : Certificate::Status::Pass;
    return cert;
}

std::vector<std::pair<Word, Mat>> enumerate_even_words(const TriangleGroup& g, int max_len) {
    std::vector<std::pair<Word, Mat>> out;
    std::set<std::string> seen;
    // frontier of freely reduced words of the current length, lex order
    std::vector<std::pair<std::vector<int>, Mat>> frontier{
        {{}, Mat::identity(3, g.field)}};
    auto record = [&](const std::vector<int>& letters, const Mat& m) {
        if (letters.size() % 2 != 0) return;
        if (seen.insert(projective_key(m)).second) out.push_back({Word{letters}, m});
    };
    record({}, frontier[0].second);
    for (int len = 1; len <= max_len; ++len) {
        std::vector<std::pair<std::vector<int>, Mat>> next;
        for (const auto& [letters, m] : frontier)
            for (int l = 1; l <= 3; ++l) {
                if (!letters.empty() && letters.back() == l) continue;
                std::vector<int> w = letters;
                w.push_back(l);
                Mat prod = m * (l == 1 ? g.I1 : l == 2 ? g.I2 : g.I3);
                record(w, prod);
                next.push_back({std::move(w), std::move(prod)});
            }
        frontier = std::move(next);
    }
    return out;
}

Certificate conjugacy_witness(const GroupHom& h1, const GroupHom& h2, const TriangleGroup& g,
                              int search_len) {
    Certificate cert;
    cert.claim = "images_contain_even_subgroup_generators";
    cert.inputs = {{"h1", h1.source.name}, {"h2", h2.source.name}, {"search_len", search_len}};
    std::vector<std::pair<std::string, std::string>> targets{
        {"12", projective_key(evaluate(Word::parse("12"), g))},
        {"23", projective_key(evaluate(Word::parse("23"), g))}};
    bool all_found = true;
    auto homs = nlohmann::json::array();
    for (const GroupHom* h : {&h1, &h2}) {
        size_t ngen = h->source.generators.size();
        std::vector<Mat> step;
        for (size_t i = 0; i < ngen; ++i) {
            step.push_back(hom_image(*h, AbsWord{static_cast<int>(i) + 1}, g));
            step.push_back(step.back().inverse());
        }
        std::map<std::string, AbsWord> found;  // target label -> witness
        std::set<std::string> visited;
        std::vector<std::pair<AbsWord, Mat>> frontier{{AbsWord{}, Mat::identity(3, g.field)}};
        visited.insert(projective_key(frontier[0].second));
        for (int depth = 1; depth <= search_len && found.size() < targets.size(); ++depth) {
            std::vector<std::pair<AbsWord, Mat>> next;
            for (const auto& [w, m] : frontier)
                for (size_t s = 0; s < step.size(); ++s) {
                    int sym = static_cast<int>(s / 2) + 1;
                    if (s % 2) sym = -sym;
                    if (!w.syms.empty() && w.syms.back() == -sym) continue;
                    AbsWord nw = w * AbsWord{sym};
                    Mat nm = m * step[s];
                    std::string key = projective_key(nm);
                    if (!visited.insert(key).second) continue;
                    for (const auto& [label, tkey] : targets)
                        if (key == tkey && !found.count(label)) found.emplace(label, nw);
                    next.push_back({std::move(nw), std::move(nm)});
                }
            frontier = std::move(next);
        }
        nlohmann::json entry{{"presentation", h->source.name}};
        for (const auto& [label, tkey] : targets) {
            auto it = found.find(label);
            if (it == found.end()) {
                entry["word_" + label] = nullptr;
                all_found = false;
            } else {
                entry["word_" + label] = it->second.str(h->source.generators);
            }
        }
        homs.push_back(entry);
    }
    cert.witness = {{"homs", homs}};
    cert.status = all_found ? Certificate::Status::Pass : Certificate::Status::Undecided;
    return cert;
}

}  // namespace crford
