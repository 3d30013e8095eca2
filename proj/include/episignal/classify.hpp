#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "episignal/csv.hpp"
#include "episignal/rng.hpp"
#include "episignal/smote.hpp"
#include "episignal/svm.hpp"
#include "episignal/textutil.hpp"

namespace episignal::classify {

inline const std::vector<std::string>& known_countries() {
    // sorted, so indices double as the label-encoder codes
    static const std::vector<std::string> c = {"Belgium", "France", "GR", "Germany",
                                               "Luxembourg"};
    return c;
}

struct LabeledTopic {
    std::vector<std::string> top_words;
    std::string country;
    int category = 0;  // 1..7
};

inline std::vector<LabeledTopic> load_labeled_topics(const std::string& path) {
    CsvReader reader(path);
    const int c_words = reader.require_column("top_words");
    const int c_country = reader.require_column("country");
    const int c_category = reader.require_column("category");
    std::vector<LabeledTopic> out;
    std::vector<std::string> f;
    while (reader.next(f)) {
        LabeledTopic t;
        for (auto& w : split(f[static_cast<std::size_t>(c_words)], ' ')) {
            if (!w.empty()) t.top_words.push_back(std::move(w));
        }
        t.country = f[static_cast<std::size_t>(c_country)];
        t.category = std::stoi(f[static_cast<std::size_t>(c_category)]);
        if (t.top_words.empty() || t.category < 1 || t.category > 7) {
            throw std::runtime_error("invalid labeled topic at record " +
                                     std::to_string(reader.line_no()));
        }
        out.push_back(std::move(t));
    }
    return out;
}

// TF-IDF over topics-as-documents with a frozen vocabulary for transform-only
// reuse on unseen topics. Same weight formula as the topic engine.
class TfidfVectorizer {
public:
    void fit(const std::vector<std::vector<std::string>>& docs) {
        if (docs.empty()) throw std::invalid_argument("TfidfVectorizer: empty fit set");
        n_docs_ = docs.size();
        std::set<std::string> words;
        for (const auto& d : docs) words.insert(d.begin(), d.end());
        vocab_.assign(words.begin(), words.end());
        index_.clear();
        for (std::size_t i = 0; i < vocab_.size(); ++i) index_[vocab_[i]] = i;
        doc_freq_.assign(vocab_.size(), 0);
        for (const auto& d : docs) {
            std::set<std::size_t> seen;
            for (const auto& w : d) seen.insert(index_.at(w));
            for (auto i : seen) ++doc_freq_[i];
        }
    }

    std::vector<double> transform(const std::vector<std::string>& doc) const {
        std::vector<double> out(vocab_.size(), 0.0);
        std::map<std::size_t, std::size_t> tf;
        for (const auto& w : doc) {
            auto it = index_.find(w);
            if (it != index_.end()) ++tf[it->second];  // out-of-vocabulary words drop out
        }
        for (const auto& [i, count] : tf) {
            out[i] = static_cast<double>(count) *
                     std::log(static_cast<double>(n_docs_) / static_cast<double>(doc_freq_[i]));
        }
        return out;
    }

    const std::vector<std::string>& vocabulary() const { return vocab_; }
    std::size_t dimension() const { return vocab_.size(); }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["n_docs"] = n_docs_;
        j["vocab"] = vocab_;
        j["doc_freq"] = doc_freq_;
        return j;
    }

    static TfidfVectorizer from_json(const nlohmann::json& j) {
        TfidfVectorizer v;
        v.n_docs_ = j.at("n_docs").get<std::size_t>();
        v.vocab_ = j.at("vocab").get<std::vector<std::string>>();
        v.doc_freq_ = j.at("doc_freq").get<std::vector<std::size_t>>();
        for (std::size_t i = 0; i < v.vocab_.size(); ++i) v.index_[v.vocab_[i]] = i;
        return v;
    }

private:
    std::size_t n_docs_ = 0;
    std::vector<std::string> vocab_;
    std::map<std::string, std::size_t> index_;
    std::vector<std::size_t> doc_freq_;
};

enum class CountryEncoding { onehot, integer };

struct FeatureSet {
    std::vector<std::vector<double>> vectors;
    std::vector<int> labels;
    TfidfVectorizer vectorizer;
    CountryEncoding encoding = CountryEncoding::onehot;
};

inline void append_country_block(std::vector<double>& vec, const std::string& country,
                                 CountryEncoding encoding) {
    const auto& countries = known_countries();
    auto it = std::find(countries.begin(), countries.end(), country);
    if (it == countries.end()) throw std::runtime_error("unknown country: " + country);
    const std::size_t code = static_cast<std::size_t>(it - countries.begin());
    if (encoding == CountryEncoding::onehot) {
        for (std::size_t i = 0; i < countries.size(); ++i) vec.push_back(i == code ? 1.0 : 0.0);
    } else {
        vec.push_back(static_cast<double>(code));
    }
}

inline FeatureSet build_features(const std::vector<LabeledTopic>& topics,
                                 CountryEncoding encoding = CountryEncoding::onehot) {
    if (topics.empty()) throw std::invalid_argument("build_features: empty topic list");
    FeatureSet out;
    out.encoding = encoding;
    std::vector<std::vector<std::string>> docs;
    docs.reserve(topics.size());
    for (const auto& t : topics) docs.push_back(t.top_words);
    out.vectorizer.fit(docs);
    for (const auto& t : topics) {
        auto vec = out.vectorizer.transform(t.top_words);
        append_country_block(vec, t.country, encoding);
        out.vectors.push_back(std::move(vec));
        out.labels.push_back(t.category);
    }
    return out;
}

struct GridChoice {
    KernelType kernel = KernelType::linear;
    double C = 1.0;
    double rbf_gamma = 0.1;
    double cv_macro_f1 = 0.0;
};

struct SvmModel {
    KernelType kernel = KernelType::linear;
    double C = 1.0;
    double rbf_gamma = 0.1;
    std::vector<int> classes;  // ascending
    struct Binary {
        std::vector<std::vector<double>> support;
        std::vector<double> coef;  // alpha_i * y_i per support vector
        double bias = 0.0;
    };
    std::vector<Binary> machines;  // one-vs-rest, aligned with classes
    std::vector<GridChoice> grid_report;
    GridChoice chosen;
    int folds = 0;
    std::uint64_t seed = 0;

    double decision(std::size_t machine, const std::vector<double>& x) const {
        const Binary& m = machines[machine];
        double u = 0.0;
        for (std::size_t i = 0; i < m.support.size(); ++i) {
            u += m.coef[i] * kernel_eval(kernel, rbf_gamma, m.support[i], x);
        }
        return u - m.bias;
    }

    int predict(const std::vector<double>& x) const {
        int best_class = classes.front();
        double best = -1e300;
        for (std::size_t m = 0; m < machines.size(); ++m) {
            const double u = decision(m, x);
            if (u > best) {  // strict: ties stay with the lower class index
                best = u;
                best_class = classes[m];
            }
        }
        return best_class;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["kernel"] = kernel_name(kernel);
        j["C"] = C;
        j["rbf_gamma"] = rbf_gamma;
        j["classes"] = classes;
        j["folds"] = folds;
        j["seed"] = seed;
        j["machines"] = nlohmann::json::array();
        for (const auto& m : machines) {
            nlohmann::json jm;
            jm["bias"] = m.bias;
            jm["coef"] = m.coef;
            jm["support"] = m.support;
            j["machines"].push_back(jm);
        }
        return j;
    }
};

struct ClassMetrics {
    int category = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
    bool absent_from_predictions = false;
};

struct EvalReport {
    std::vector<ClassMetrics> per_class;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    double accuracy = 0.0;
};

inline EvalReport evaluate(const std::vector<int>& truth, const std::vector<int>& predicted,
                           const std::vector<int>& classes) {
    if (truth.size() != predicted.size() || truth.empty()) {
        throw std::invalid_argument("evaluate: bad prediction set");
    }
    EvalReport rep;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) correct += truth[i] == predicted[i];
    rep.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
    for (int cls : classes) {
        std::size_t tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < truth.size(); ++i) {
            const bool t = truth[i] == cls;
            const bool p = predicted[i] == cls;
            tp += t && p;
            fp += !t && p;
            fn += t && !p;
        }
        ClassMetrics m;
        m.category = cls;
        m.support = tp + fn;
        m.absent_from_predictions = (tp + fp) == 0;
        m.precision = m.absent_from_predictions ? 0.0
                                                : static_cast<double>(tp) /
                                                      static_cast<double>(tp + fp);
        m.recall = m.support == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(m.support);
        m.f1 = (m.precision + m.recall) > 0.0
                   ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                   : 0.0;
        rep.per_class.push_back(m);
        rep.macro_precision += m.precision;
        rep.macro_recall += m.recall;
        rep.macro_f1 += m.f1;
    }
    const double k = static_cast<double>(classes.size());
    rep.macro_precision /= k;
    rep.macro_recall /= k;
    rep.macro_f1 /= k;
    return rep;
}

struct TrainConfig {
    std::vector<double> c_grid = {0.1, 1.0, 10.0, 100.0};
    std::vector<KernelType> kernel_grid = {KernelType::linear, KernelType::rbf};
    std::vector<double> rbf_gamma_grid = {0.01, 0.1, 1.0};
    int folds = 10;
    double test_fraction = 0.2;
    int smote_k = 5;
    double tol = 1e-3;
    std::uint64_t seed = 0;
};

struct TrainResult {
    SvmModel model;
    std::vector<std::vector<double>> test_features;
    std::vector<int> test_labels;
    EvalReport test_report;
};

namespace detail {

// Pairwise kernel inputs shared by every grid cell over one training subset.
struct GramCache {
    std::vector<std::vector<double>> dot;
    std::vector<std::vector<double>> sqd;

    explicit GramCache(const std::vector<std::vector<double>>& x) {
        const std::size_t n = x.size();
        dot.assign(n, std::vector<double>(n, 0.0));
        sqd.assign(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i; j < n; ++j) {
                double d = 0.0;
                for (std::size_t t = 0; t < x[i].size(); ++t) d += x[i][t] * x[j][t];
                dot[i][j] = dot[j][i] = d;
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i; j < n; ++j) {
                sqd[i][j] = sqd[j][i] = dot[i][i] + dot[j][j] - 2.0 * dot[i][j];
            }
        }
    }

    std::function<double(std::size_t, std::size_t)> kernel(KernelType k, double gamma) const {
        if (k == KernelType::linear) {
            return [this](std::size_t i, std::size_t j) { return dot[i][j]; };
        }
        return [this, gamma](std::size_t i, std::size_t j) {
            return std::exp(-gamma * sqd[i][j]);
        };
    }
};

inline std::vector<BinarySvm> train_ovr(const GramCache& gram, const std::vector<int>& labels,
                                        const std::vector<int>& classes, KernelType kernel,
                                        double C, double gamma, double tol) {
    std::vector<BinarySvm> machines(classes.size());
    auto kmat = gram.kernel(kernel, gamma);
    for (std::size_t m = 0; m < classes.size(); ++m) {
        std::vector<int> y(labels.size());
        for (std::size_t i = 0; i < labels.size(); ++i) y[i] = labels[i] == classes[m] ? 1 : -1;
        machines[m].train(kmat, y, C, tol);
    }
    return machines;
}

}  // namespace detail

// Stratified 80/20 split, SMOTE on the training side only, grid search with
// stratified k-fold CV on macro-F1, winner refit on the full training
// portion. Deterministic for a given seed.
inline TrainResult train_svm(const std::vector<std::vector<double>>& features,
                             const std::vector<int>& labels, const TrainConfig& config) {
    if (features.size() != labels.size() || features.empty()) {
        throw std::invalid_argument("train_svm: bad input");
    }
    std::vector<int> classes;
    {
        std::set<int> s(labels.begin(), labels.end());
        classes.assign(s.begin(), s.end());
    }

    // stratified split
    Rng split_rng(derive_seed(config.seed, 0));
    std::vector<std::size_t> train_idx, test_idx;
    for (int cls : classes) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == cls) idx.push_back(i);
        }
        split_rng.shuffle(idx);
        std::size_t n_test = static_cast<std::size_t>(
            std::llround(config.test_fraction * static_cast<double>(idx.size())));
        n_test = std::max<std::size_t>(1, std::min(n_test, idx.size() - 1));
        for (std::size_t i = 0; i < idx.size(); ++i) {
            (i < n_test ? test_idx : train_idx).push_back(idx[i]);
        }
    }
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());

    std::vector<std::vector<double>> train_x;
    std::vector<int> train_y;
    for (auto i : train_idx) {
        train_x.push_back(features[i]);
        train_y.push_back(labels[i]);
    }

    // balance the training portion
    SmoteResult balanced = smote(train_x, train_y, config.smote_k, derive_seed(config.seed, 1));
    for (int cls : classes) {
        const auto c = static_cast<std::size_t>(
            std::count(balanced.labels.begin(), balanced.labels.end(), cls));
        if (c < static_cast<std::size_t>(config.folds)) {
            throw std::runtime_error("train_svm: class " + std::to_string(cls) +
                                     " has fewer samples than folds");
        }
    }

    // stratified fold assignment on the balanced training set
    Rng fold_rng(derive_seed(config.seed, 2));
    std::vector<int> fold_of(balanced.labels.size(), 0);
    for (int cls : classes) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < balanced.labels.size(); ++i) {
            if (balanced.labels[i] == cls) idx.push_back(i);
        }
        fold_rng.shuffle(idx);
        for (std::size_t i = 0; i < idx.size(); ++i) {
            fold_of[idx[i]] = static_cast<int>(i % static_cast<std::size_t>(config.folds));
        }
    }

    // grid cells in declared order; linear collapses the gamma axis
    std::vector<GridChoice> cells;
    for (KernelType kernel : config.kernel_grid) {
        for (double C : config.c_grid) {
            if (kernel == KernelType::linear) {
                cells.push_back({kernel, C, 0.0, 0.0});
            } else {
                for (double g : config.rbf_gamma_grid) cells.push_back({kernel, C, g, 0.0});
            }
        }
    }

    for (int fold = 0; fold < config.folds; ++fold) {
        std::vector<std::size_t> fit_idx, val_idx;
        for (std::size_t i = 0; i < balanced.labels.size(); ++i) {
            (fold_of[i] == fold ? val_idx : fit_idx).push_back(i);
        }
        std::vector<std::vector<double>> fit_x;
        std::vector<int> fit_y;
        for (auto i : fit_idx) {
            fit_x.push_back(balanced.features[i]);
            fit_y.push_back(balanced.labels[i]);
        }
        detail::GramCache gram(fit_x);
        for (auto& cell : cells) {
            auto machines =
                detail::train_ovr(gram, fit_y, classes, cell.kernel, cell.C, cell.rbf_gamma,
                                  config.tol);
            std::vector<int> truth, pred;
            for (auto i : val_idx) {
                const auto& x = balanced.features[i];
                int best_class = classes.front();
                double best = -1e300;
                for (std::size_t m = 0; m < machines.size(); ++m) {
                    double u = -machines[m].bias();
                    const auto& alphas = machines[m].alphas();
                    for (std::size_t t = 0; t < fit_x.size(); ++t) {
                        if (alphas[t] == 0.0) continue;
                        const double yv = fit_y[t] == classes[m] ? 1.0 : -1.0;
                        u += alphas[t] * yv *
                             kernel_eval(cell.kernel, cell.rbf_gamma, fit_x[t], x);
                    }
                    if (u > best) {
                        best = u;
                        best_class = classes[m];
                    }
                }
                truth.push_back(balanced.labels[i]);
                pred.push_back(best_class);
            }
            cell.cv_macro_f1 += evaluate(truth, pred, classes).macro_f1;
        }
    }
    for (auto& cell : cells) cell.cv_macro_f1 /= static_cast<double>(config.folds);

    std::size_t best_cell = 0;
    for (std::size_t i = 1; i < cells.size(); ++i) {
        if (cells[i].cv_macro_f1 > cells[best_cell].cv_macro_f1) best_cell = i;
    }

    // refit the winner on the full balanced training portion
    detail::GramCache gram(balanced.features);
    auto machines = detail::train_ovr(gram, balanced.labels, classes, cells[best_cell].kernel,
                                      cells[best_cell].C, cells[best_cell].rbf_gamma, config.tol);

    TrainResult out;
    out.model.kernel = cells[best_cell].kernel;
    out.model.C = cells[best_cell].C;
    out.model.rbf_gamma = cells[best_cell].rbf_gamma;
    out.model.classes = classes;
    out.model.grid_report = cells;
    out.model.chosen = cells[best_cell];
    out.model.folds = config.folds;
    out.model.seed = config.seed;
    for (std::size_t m = 0; m < machines.size(); ++m) {
        SvmModel::Binary bin;
        const auto& alphas = machines[m].alphas();
        for (std::size_t i = 0; i < balanced.features.size(); ++i) {
            if (alphas[i] == 0.0) continue;
            bin.support.push_back(balanced.features[i]);
            bin.coef.push_back(alphas[i] * (balanced.labels[i] == classes[m] ? 1.0 : -1.0));
        }
        bin.bias = machines[m].bias();
        out.model.machines.push_back(std::move(bin));
    }

    for (auto i : test_idx) {
        out.test_features.push_back(features[i]);
        out.test_labels.push_back(labels[i]);
    }
    std::vector<int> pred;
    for (const auto& x : out.test_features) pred.push_back(out.model.predict(x));
    out.test_report = evaluate(out.test_labels, pred, classes);
    return out;
}

}  // namespace episignal::classify
