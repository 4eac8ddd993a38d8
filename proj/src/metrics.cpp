#include "ecgbeat/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include "ecgbeat/errors.hpp"
#include "ecgbeat/record_io.hpp"

namespace ecgbeat {

std::uint64_t ConfusionMatrix::total() const {
    return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

ConfusionMatrix confusion_matrix(std::span<const ClassId> y_true, std::span<const ClassId> y_pred,
                                 std::size_t n_classes) {
    if (y_true.size() != y_pred.size())
        throw ValidationError("confusion_matrix: y_true and y_pred differ in length");
    ConfusionMatrix cm(n_classes);
    const auto k = static_cast<ClassId>(n_classes);
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (y_true[i] < 0 || y_true[i] >= k || y_pred[i] < 0 || y_pred[i] >= k)
            throw ValidationError("confusion_matrix: label out of range at sample " + std::to_string(i));
        ++cm.at(static_cast<std::size_t>(y_true[i]), static_cast<std::size_t>(y_pred[i]));
    }
    return cm;
}

MacroMetrics macro_metrics(const ConfusionMatrix& cm) {
    const std::size_t k = cm.n_classes();
    const std::uint64_t total = cm.total();
    if (k == 0 || total == 0) throw ValidationError("macro_metrics: empty confusion matrix");

    MacroMetrics m;
    std::uint64_t trace = 0;
    for (std::size_t c = 0; c < k; ++c) {
        std::uint64_t predicted = 0, actual = 0;
        for (std::size_t j = 0; j < k; ++j) {
            predicted += cm.at(j, c);
            actual += cm.at(c, j);
        }
        const auto tp = static_cast<double>(cm.at(c, c));
        trace += cm.at(c, c);

        ClassMetrics pc;
        pc.precision = predicted ? tp / static_cast<double>(predicted) : 0.0;
        pc.recall = actual ? tp / static_cast<double>(actual) : 0.0;
        pc.f1 = pc.precision + pc.recall > 0.0
                    ? 2.0 * pc.precision * pc.recall / (pc.precision + pc.recall)
                    : 0.0;
        m.precision += pc.precision;
        m.recall += pc.recall;
        m.f1 += pc.f1;
        m.per_class.push_back(pc);
    }
    const auto kd = static_cast<double>(k);
    m.precision /= kd;
    m.recall /= kd;
    m.f1 /= kd;
    m.accuracy = static_cast<double>(trace) / static_cast<double>(total);
    return m;
}

void write_metrics_csv(std::span<const ReportRow> rows, std::ostream& out) {
    out << "model,precision,recall,accuracy,f1\n";
    for (const auto& r : rows)
        out << r.model << ',' << format_double(r.metrics.precision) << ','
            << format_double(r.metrics.recall) << ',' << format_double(r.metrics.accuracy) << ','
            << format_double(r.metrics.f1) << '\n';
}

std::vector<ReportRow> read_metrics_csv(std::istream& in) {
    std::vector<ReportRow> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line_no == 1) {
            if (line != "model,precision,recall,accuracy,f1")
                throw ParseError("metrics csv", line_no, "unexpected header");
            continue;
        }
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (std::size_t pos; (pos = line.find(',', start)) != std::string::npos; start = pos + 1)
            fields.push_back(line.substr(start, pos - start));
        fields.push_back(line.substr(start));
        if (fields.size() != 5) throw ParseError("metrics csv", line_no, "expected 5 columns");
        ReportRow row;
        row.model = fields[0];
        double* slots[] = {&row.metrics.precision, &row.metrics.recall, &row.metrics.accuracy,
                           &row.metrics.f1};
        for (std::size_t i = 0; i < 4; ++i) {
            const auto v = parse_double(fields[i + 1]);
            if (!v) throw ParseError("metrics csv", line_no, "bad number '" + fields[i + 1] + "'");
            *slots[i] = *v;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_metrics_table(std::span<const ReportRow> rows, std::ostream& out) {
    std::size_t width = 5;
    for (const auto& r : rows) width = std::max(width, r.model.size());
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-*s | %9s | %6s | %8s | %8s\n", static_cast<int>(width), "Model",
                  "Precision", "Recall", "Accuracy", "F1 score");
    out << buf << std::string(width, '-') << "-+-----------+--------+----------+---------\n";
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%-*s | %9.4f | %6.4f | %8.4f | %8.4f\n", static_cast<int>(width),
                      r.model.c_str(), r.metrics.precision, r.metrics.recall, r.metrics.accuracy,
                      r.metrics.f1);
        out << buf;
    }
}

}  // namespace ecgbeat
