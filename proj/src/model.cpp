#include "ecgbeat/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <type_traits>

#include "ecgbeat/errors.hpp"
#include "ecgbeat/record_io.hpp"
#include "model_internal.hpp"

namespace ecgbeat {

namespace detail {

std::size_t check_training_input(const Matrix& rows, std::span<const ClassId> labels, std::size_t n_classes) {
    if (rows.rows() != labels.size())
        throw ValidationError("fit: " + std::to_string(rows.rows()) + " rows but " +
                              std::to_string(labels.size()) + " labels");
    if (rows.rows() == 0 || rows.cols() == 0) throw ValidationError("fit: empty training set");
    for (double v : rows.data())
        if (!std::isfinite(v)) throw ValidationError("fit: non-finite feature value");

    ClassId max_label = 0;
    std::set<ClassId> present;
    for (ClassId y : labels) {
        if (y < 0) throw ValidationError("fit: negative class label");
        max_label = std::max(max_label, y);
        present.insert(y);
    }
    if (present.size() < 2) throw ValidationError("fit: need at least 2 distinct classes");
    const std::size_t k = n_classes ? n_classes : static_cast<std::size_t>(max_label) + 1;
    if (static_cast<std::size_t>(max_label) >= k)
        throw ValidationError("fit: label " + std::to_string(max_label) + " outside " + std::to_string(k) +
                              " classes");
    return k;
}

SortedColumns::SortedColumns(const Matrix& rows)
    : n_rows(rows.rows()), values(rows.cols()), order(rows.cols()) {
    for (std::size_t f = 0; f < rows.cols(); ++f) {
        auto& col = values[f];
        col.resize(n_rows);
        for (std::size_t i = 0; i < n_rows; ++i) col[i] = rows(i, f);
        auto& ord = order[f];
        ord.resize(n_rows);
        std::iota(ord.begin(), ord.end(), std::size_t{0});
        std::stable_sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) { return col[a] < col[b]; });
    }
}

double split_point(double lo, double hi) {
    const double mid = lo + (hi - lo) / 2.0;
    return mid < hi ? mid : lo;
}

}  // namespace detail

const TreeNode& Tree::leaf_for(std::span<const double> row) const {
    const TreeNode* node = &nodes.front();
    while (!node->is_leaf())
        node = &nodes[static_cast<std::size_t>(row[static_cast<std::size_t>(node->feature)] <= node->threshold
                                                   ? node->left
                                                   : node->right)];
    return *node;
}

std::size_t Tree::n_leaves() const {
    return static_cast<std::size_t>(
        std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

void GbdtParams::validate() const {
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
        throw ValidationError("gbdt: learning_rate must be > 0");
    if (max_depth < 1) throw ValidationError("gbdt: max_depth must be >= 1");
    if (min_data_in_leaf < 1) throw ValidationError("gbdt: min_data_in_leaf must be >= 1");
    if (!(l1_alpha >= 0.0) || !(l2_lambda >= 0.0))
        throw ValidationError("gbdt: l1_alpha and l2_lambda must be >= 0");
}

void RfParams::validate() const {
    if (n_trees < 1) throw ValidationError("forest: n_trees must be >= 1");
    if (min_samples_leaf < 1) throw ValidationError("forest: min_samples_leaf must be >= 1");
    if (features_per_split < 1) throw ValidationError("forest: features_per_split must be >= 1");
}

std::vector<double> softmax(std::span<const double> scores) {
    std::vector<double> p(scores.begin(), scores.end());
    if (p.empty()) return p;
    const double top = *std::max_element(p.begin(), p.end());
    double sum = 0.0;
    for (double& v : p) {
        v = std::exp(v - top);
        sum += v;
    }
    for (double& v : p) v /= sum;
    return p;
}

ClassId argmax(std::span<const double> values) {
    return static_cast<ClassId>(std::max_element(values.begin(), values.end()) - values.begin());
}

std::vector<double> EnsembleModel::raw_scores(std::span<const double> row, std::size_t rounds) const {
    if (row.size() != n_features)
        throw ValidationError("predict: row has " + std::to_string(row.size()) + " features, model expects " +
                              std::to_string(n_features));
    std::vector<double> scores = base_score;
    rounds = std::min(rounds, n_rounds);
    for (std::size_t t = 0; t < rounds; ++t)
        for (std::size_t k = 0; k < n_classes; ++k)
            scores[k] += trees[t * n_classes + k].leaf_for(row).value[0];
    return scores;
}

Prediction EnsembleModel::predict(std::span<const double> row) const {
    Prediction out;
    if (kind == ModelKind::gbdt) {
        out.probabilities = softmax(raw_scores(row));
    } else {
        if (row.size() != n_features)
            throw ValidationError("predict: row has " + std::to_string(row.size()) +
                                  " features, model expects " + std::to_string(n_features));
        out.probabilities.assign(n_classes, 0.0);
        for (const auto& tree : trees) {
            const auto& hist = tree.leaf_for(row).value;
            const double total = std::accumulate(hist.begin(), hist.end(), 0.0);
            for (std::size_t k = 0; k < n_classes; ++k) out.probabilities[k] += hist[k] / total;
        }
        for (double& p : out.probabilities) p /= static_cast<double>(trees.size());
    }
    out.label = argmax(out.probabilities);
    return out;
}

void EnsembleModel::validate() const {
    if (n_classes < 2) throw ValidationError("model: need at least 2 classes");
    if (n_features < 1) throw ValidationError("model: need at least 1 feature");
    if (kind == ModelKind::gbdt) {
        if (trees.size() != n_rounds * n_classes)
            throw ValidationError("model: gbdt must hold rounds * classes trees");
        if (base_score.size() != n_classes) throw ValidationError("model: base score size mismatch");
    } else if (trees.empty()) {
        throw ValidationError("model: forest has no trees");
    }
    const std::size_t leaf_width = kind == ModelKind::gbdt ? 1 : n_classes;
    for (const auto& tree : trees) {
        if (tree.nodes.empty()) throw ValidationError("model: empty tree");
        for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
            const auto& n = tree.nodes[i];
            if (n.is_leaf()) {
                if (n.value.size() != leaf_width) throw ValidationError("model: bad leaf width");
                for (double v : n.value)
                    if (!std::isfinite(v)) throw ValidationError("model: non-finite leaf value");
                if (kind == ModelKind::forest &&
                    !(std::accumulate(n.value.begin(), n.value.end(), 0.0) > 0.0))
                    throw ValidationError("model: forest leaf with empty histogram");
                continue;
            }
            if (static_cast<std::size_t>(n.feature) >= n_features)
                throw ValidationError("model: split feature out of range");
            // Children after their parent keeps every tree acyclic.
            for (auto child : {n.left, n.right})
                if (child <= static_cast<std::int32_t>(i) ||
                    static_cast<std::size_t>(child) >= tree.nodes.size())
                    throw ValidationError("model: bad child index");
        }
    }
}

double multiclass_logloss(const EnsembleModel& model, const Matrix& rows, std::span<const ClassId> labels,
                          std::size_t rounds) {
    double total = 0.0;
    for (std::size_t i = 0; i < rows.rows(); ++i) {
        const auto p = softmax(model.raw_scores(rows.row(i), rounds));
        total -= std::log(std::max(p[static_cast<std::size_t>(labels[i])], 1e-300));
    }
    return total / static_cast<double>(rows.rows());
}

std::vector<ClassId> predict_labels(const EnsembleModel& model, const Matrix& rows) {
    std::vector<ClassId> out;
    out.reserve(rows.rows());
    for (std::size_t i = 0; i < rows.rows(); ++i) out.push_back(model.predict(rows.row(i)).label);
    return out;
}

// Model file grammar (one record per line, tokens separated by one space):
//   ecgbeat-model 1
//   kind gbdt|forest
//   classes K
//   features F
//   rounds R
//   base_score b_0 ... b_{K-1}
//   trees T
//   T times: tree <index> <n_nodes>, then n_nodes lines of
//     split <feature> <threshold> <left> <right>
//     leaf <width> <v_0> ... <v_{width-1}>
//   end
namespace {

constexpr const char* kMagic = "ecgbeat-model";
constexpr int kFormatVersion = 1;

class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    std::istringstream next(const std::string& expected_key) {
        std::string line;
        if (!std::getline(in_, line)) fail("truncated file, expected '" + expected_key + "'");
        ++line_no_;
        std::istringstream ss(line);
        std::string key;
        ss >> key;
        if (key != expected_key) fail("expected '" + expected_key + "', got '" + key + "'");
        return ss;
    }

    template <typename T>
    T read(std::istringstream& ss, const char* what) {
        std::string token;
        if (!(ss >> token)) fail(std::string("missing ") + what);
        if constexpr (std::is_floating_point_v<T>) {
            const auto v = parse_double(token);
            if (!v) fail(std::string("bad ") + what + " '" + token + "'");
            return *v;
        } else {
            std::istringstream ts(token);
            T v{};
            if (!(ts >> v) || !ts.eof()) fail(std::string("bad ") + what + " '" + token + "'");
            return v;
        }
    }

    void expect_end(std::istringstream& ss) {
        std::string extra;
        if (ss >> extra) fail("unexpected token '" + extra + "'");
    }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError("model", line_no_, msg); }

private:
    std::istream& in_;
    std::size_t line_no_ = 0;
};

}  // namespace

void write_model(const EnsembleModel& model, std::ostream& out) {
    model.validate();
    out << kMagic << ' ' << kFormatVersion << '\n';
    out << "kind " << (model.kind == ModelKind::gbdt ? "gbdt" : "forest") << '\n';
    out << "classes " << model.n_classes << '\n';
    out << "features " << model.n_features << '\n';
    out << "rounds " << model.n_rounds << '\n';
    out << "base_score";
    for (double b : model.base_score) out << ' ' << format_double(b);
    out << '\n';
    out << "trees " << model.trees.size() << '\n';
    for (std::size_t t = 0; t < model.trees.size(); ++t) {
        const auto& tree = model.trees[t];
        out << "tree " << t << ' ' << tree.nodes.size() << '\n';
        for (const auto& n : tree.nodes) {
            if (n.is_leaf()) {
                out << "leaf " << n.value.size();
                for (double v : n.value) out << ' ' << format_double(v);
                out << '\n';
            } else {
                out << "split " << n.feature << ' ' << format_double(n.threshold) << ' ' << n.left << ' '
                    << n.right << '\n';
            }
        }
    }
    out << "end\n";
}

EnsembleModel read_model(std::istream& in) {
    LineReader lr(in);
    EnsembleModel m;

    auto header = lr.next(kMagic);
    const int version = lr.read<int>(header, "version");
    if (version != kFormatVersion)
        lr.fail("unsupported model format version " + std::to_string(version));
    lr.expect_end(header);

    auto kind = lr.next("kind");
    const auto kind_name = lr.read<std::string>(kind, "kind");
    if (kind_name == "gbdt")
        m.kind = ModelKind::gbdt;
    else if (kind_name == "forest")
        m.kind = ModelKind::forest;
    else
        lr.fail("unknown model kind '" + kind_name + "'");

    auto classes = lr.next("classes");
    m.n_classes = lr.read<std::size_t>(classes, "class count");
    auto features = lr.next("features");
    m.n_features = lr.read<std::size_t>(features, "feature count");
    auto rounds = lr.next("rounds");
    m.n_rounds = lr.read<std::size_t>(rounds, "round count");
    if (m.n_classes > 1u << 16 || m.n_features > 1u << 24) lr.fail("implausible model dimensions");

    auto base = lr.next("base_score");
    std::string token;
    while (base >> token) {
        const auto v = parse_double(token);
        if (!v) lr.fail("bad base score '" + token + "'");
        m.base_score.push_back(*v);
    }

    auto trees = lr.next("trees");
    const auto n_trees = lr.read<std::size_t>(trees, "tree count");
    for (std::size_t t = 0; t < n_trees; ++t) {
        auto head = lr.next("tree");
        if (lr.read<std::size_t>(head, "tree index") != t) lr.fail("tree index out of sequence");
        const auto n_nodes = lr.read<std::size_t>(head, "node count");
        Tree tree;
        for (std::size_t i = 0; i < n_nodes; ++i) {
            std::string line;
            if (!std::getline(in, line)) lr.fail("truncated tree " + std::to_string(t));
            std::istringstream ss(line);
            std::string key;
            ss >> key;
            TreeNode node;
            if (key == "leaf") {
                const auto width = lr.read<std::size_t>(ss, "leaf width");
                if (width > m.n_classes) lr.fail("leaf wider than class count");
                for (std::size_t w = 0; w < width; ++w) node.value.push_back(lr.read<double>(ss, "leaf value"));
            } else if (key == "split") {
                node.feature = lr.read<std::int32_t>(ss, "feature");
                node.threshold = lr.read<double>(ss, "threshold");
                node.left = lr.read<std::int32_t>(ss, "left child");
                node.right = lr.read<std::int32_t>(ss, "right child");
                if (node.feature < 0) lr.fail("negative split feature");
            } else {
                lr.fail("expected 'leaf' or 'split' in tree " + std::to_string(t));
            }
            lr.expect_end(ss);
            tree.nodes.push_back(std::move(node));
        }
        m.trees.push_back(std::move(tree));
    }
    auto end = lr.next("end");
    lr.expect_end(end);

    try {
        m.validate();
    } catch (const ValidationError& e) {
        throw ParseError("model", 0, e.what());
    }
    return m;
}

void save_model(const EnsembleModel& model, const std::filesystem::path& path) {
    std::ostringstream buf;
    write_model(model, buf);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << buf.str();
}

EnsembleModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return read_model(in);
}

}  // namespace ecgbeat
