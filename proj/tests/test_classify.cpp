#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <set>

#include "episignal/classify.hpp"

using namespace episignal;
using namespace episignal::classify;

namespace {

// Deterministic two-blob binary problem.
void blob_data(std::vector<std::vector<double>>& x, std::vector<int>& y, std::size_t per_class,
               double separation, std::uint64_t seed) {
    Rng rng(seed);
    for (int cls = 0; cls < 2; ++cls) {
        for (std::size_t i = 0; i < per_class; ++i) {
            x.push_back({cls * separation + rng.normal() * 0.4,
                         cls * separation + rng.normal() * 0.4});
            y.push_back(cls == 0 ? -1 : 1);
        }
    }
}

bool on_segment(const std::vector<double>& s, const std::vector<double>& a,
                const std::vector<double>& b) {
    // s = a + u * (b - a) for some u in [0, 1]
    double u = -1.0;
    for (std::size_t d = 0; d < s.size(); ++d) {
        const double denom = b[d] - a[d];
        if (std::fabs(denom) > 1e-12) {
            u = (s[d] - a[d]) / denom;
            break;
        }
    }
    if (u < -1e-9 || u > 1.0 + 1e-9) return false;
    for (std::size_t d = 0; d < s.size(); ++d) {
        if (std::fabs(a[d] + u * (b[d] - a[d]) - s[d]) > 1e-9) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("smote: balanced input passes through unchanged") {
    std::vector<std::vector<double>> x{{0, 0}, {1, 0}, {5, 5}, {6, 5}};
    std::vector<int> y{1, 1, 2, 2};
    auto res = smote(x, y, 5, 3);
    CHECK(res.features == x);
    CHECK(res.labels == y);
}

TEST_CASE("smote: balances counts, preserves originals, synthetics convex") {
    Rng rng(19);
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    for (int i = 0; i < 10; ++i) {
        x.push_back({rng.normal(), rng.normal(), rng.normal()});
        y.push_back(1);
    }
    for (int i = 0; i < 4; ++i) {
        x.push_back({5 + rng.normal(), 5 + rng.normal(), rng.normal()});
        y.push_back(2);
    }
    auto res = smote(x, y, 5, 7);
    std::map<int, std::size_t> counts;
    for (int label : res.labels) ++counts[label];
    CHECK(counts[1] == 10);
    CHECK(counts[2] == 10);
    // originals verbatim, in order
    for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK(res.features[i] == x[i]);
        CHECK(res.labels[i] == y[i]);
    }
    // every synthetic lies on a segment between two same-class originals
    for (std::size_t i = x.size(); i < res.features.size(); ++i) {
        bool found = false;
        for (std::size_t a = 0; a < x.size() && !found; ++a) {
            if (y[a] != res.labels[i]) continue;
            for (std::size_t b = 0; b < x.size() && !found; ++b) {
                if (b == a || y[b] != res.labels[i]) continue;
                found = on_segment(res.features[i], x[a], x[b]);
            }
        }
        CHECK(found);
    }
    // deterministic per seed
    auto res2 = smote(x, y, 5, 7);
    CHECK(res.features == res2.features);
    auto res3 = smote(x, y, 5, 8);
    CHECK(res.features != res3.features);
}

TEST_CASE("smote: singleton class is an error naming the class") {
    std::vector<std::vector<double>> x{{0, 0}, {1, 1}, {2, 2}};
    std::vector<int> y{1, 1, 4};
    CHECK_THROWS_WITH(smote(x, y, 5, 0), Catch::Matchers::ContainsSubstring("4"));
}

TEST_CASE("binary svm: separable data reaches 100% training accuracy with KKT held") {
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    blob_data(x, y, 20, 6.0, 13);
    detail::GramCache gram(x);
    for (auto kernel : {KernelType::linear, KernelType::rbf}) {
        BinarySvm svm;
        svm.train(gram.kernel(kernel, 0.5), y, 1.0);
        std::size_t correct = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            correct += (svm.train_decision(i) > 0 ? 1 : -1) == y[i];
        }
        CHECK(correct == x.size());
        CHECK(svm.kkt_violation() <= 1e-3 + 1e-9);
    }
}

TEST_CASE("binary svm: duplicate points (eta = 0) still converge") {
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    blob_data(x, y, 12, 5.0, 3);
    // exact duplicates on both sides of the margin
    x.push_back(x[0]);
    y.push_back(y[0]);
    x.push_back(x[15]);
    y.push_back(y[15]);
    detail::GramCache gram(x);
    BinarySvm svm;
    svm.train(gram.kernel(KernelType::linear, 0.0), y, 1.0);
    CHECK(svm.kkt_violation() <= 1e-3 + 1e-9);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        correct += (svm.train_decision(i) > 0 ? 1 : -1) == y[i];
    }
    CHECK(correct == x.size());
}

TEST_CASE("binary svm: decision function is permutation invariant") {
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    blob_data(x, y, 15, 3.0, 29);
    detail::GramCache gram(x);
    BinarySvm svm;
    svm.train(gram.kernel(KernelType::rbf, 0.5), y, 10.0);

    // permute the training order and retrain
    std::vector<std::size_t> perm(x.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = (i * 7 + 3) % perm.size();
    std::vector<std::vector<double>> xp;
    std::vector<int> yp;
    for (auto i : perm) {
        xp.push_back(x[i]);
        yp.push_back(y[i]);
    }
    detail::GramCache gram_p(xp);
    BinarySvm svm_p;
    svm_p.train(gram_p.kernel(KernelType::rbf, 0.5), yp, 10.0);

    // the fitted function is unique, so decisions agree within solver tolerance
    for (std::size_t i = 0; i < x.size(); ++i) {
        double f = 0.0, fp = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            f += svm.alphas()[j] * y[j] * kernel_eval(KernelType::rbf, 0.5, x[j], x[i]);
            fp += svm_p.alphas()[j] * yp[j] * kernel_eval(KernelType::rbf, 0.5, xp[j], x[i]);
        }
        f -= svm.bias();
        fp -= svm_p.bias();
        CHECK(f == Catch::Approx(fp).margin(0.02));
        CHECK((f > 0) == (fp > 0));
    }
}

TEST_CASE("build_features: hand-computed tfidf and country blocks") {
    std::vector<LabeledTopic> topics{
        {{"a", "b"}, "GR", 1},
        {{"a", "c"}, "Luxembourg", 2},
        {{"d"}, "Belgium", 3},
    };
    auto fs = build_features(topics, CountryEncoding::onehot);
    // vocabulary sorted: a b c d; N = 3, df(a) = 2, df(b) = df(c) = df(d) = 1
    const double ln15 = std::log(1.5);
    const double ln3 = std::log(3.0);
    REQUIRE(fs.vectors.size() == 3);
    REQUIRE(fs.vectors[0].size() == 4 + 5);
    CHECK(fs.vectors[0][0] == Catch::Approx(ln15).epsilon(1e-12));
    CHECK(fs.vectors[0][1] == Catch::Approx(ln3).epsilon(1e-12));
    CHECK(fs.vectors[0][2] == 0.0);
    CHECK(fs.vectors[0][3] == 0.0);
    // country one-hot order: Belgium France GR Germany Luxembourg
    CHECK(fs.vectors[0][4 + 2] == 1.0);  // GR
    CHECK(fs.vectors[1][4 + 4] == 1.0);  // Luxembourg
    CHECK(fs.vectors[2][4 + 0] == 1.0);  // Belgium
    double onehot_sum = 0.0;
    for (std::size_t i = 4; i < 9; ++i) onehot_sum += fs.vectors[0][i];
    CHECK(onehot_sum == 1.0);

    // disjoint-word topics have orthogonal tfidf blocks
    double dot = 0.0;
    for (std::size_t i = 0; i < 4; ++i) dot += fs.vectors[1][i] * fs.vectors[2][i];
    CHECK(dot == 0.0);

    // identical topics produce identical vectors
    std::vector<LabeledTopic> twice{{{"x", "y"}, "GR", 1}, {{"x", "y"}, "GR", 2}};
    auto fs2 = build_features(twice);
    CHECK(fs2.vectors[0] == fs2.vectors[1]);

    auto fs3 = build_features(topics, CountryEncoding::integer);
    REQUIRE(fs3.vectors[0].size() == 4 + 1);
    CHECK(fs3.vectors[0][4] == 2.0);  // GR
    CHECK(fs3.vectors[1][4] == 4.0);  // Luxembourg

    CHECK_THROWS(build_features({{{"a"}, "Narnia", 1}}));
}

TEST_CASE("vectorizer transform-only reuse ignores unseen words") {
    TfidfVectorizer v;
    v.fit({{"a", "b"}, {"a", "c"}});
    auto t = v.transform({"a", "zzz", "zzz"});
    REQUIRE(t.size() == 3);
    CHECK(t[0] == Catch::Approx(1.0 * std::log(1.0)).margin(1e-15));  // df(a)=2, N=2
    CHECK(t[1] == 0.0);
    CHECK(t[2] == 0.0);
    auto j = v.to_json();
    auto back = TfidfVectorizer::from_json(j);
    CHECK(back.transform({"a", "zzz", "zzz"}) == t);
}

TEST_CASE("evaluate: identities and a hand-scored confusion matrix") {
    SECTION("perfect predictions") {
        std::vector<int> truth{1, 2, 3, 4, 5, 6, 7};
        auto rep = evaluate(truth, truth, {1, 2, 3, 4, 5, 6, 7});
        CHECK(rep.macro_f1 == 1.0);
        CHECK(rep.accuracy == 1.0);
        for (const auto& m : rep.per_class) {
            CHECK(m.precision == 1.0);
            CHECK(m.recall == 1.0);
        }
    }
    SECTION("all predictions one class over uniform truth") {
        std::vector<int> truth{1, 2, 3, 4, 5, 6, 7};
        std::vector<int> pred(7, 3);
        auto rep = evaluate(truth, pred, {1, 2, 3, 4, 5, 6, 7});
        for (const auto& m : rep.per_class) {
            if (m.category == 3) {
                CHECK(m.recall == 1.0);
                CHECK(m.precision == Catch::Approx(1.0 / 7.0));
            } else {
                CHECK(m.recall == 0.0);
                CHECK(m.precision == 0.0);
                CHECK(m.absent_from_predictions);
            }
        }
    }
    SECTION("ten-sample hand tally") {
        std::vector<int> truth{1, 1, 1, 2, 2, 2, 3, 3, 3, 3};
        std::vector<int> pred{1, 1, 2, 2, 2, 3, 3, 3, 1, 3};
        auto rep = evaluate(truth, pred, {1, 2, 3});
        CHECK(rep.per_class[0].precision == Catch::Approx(2.0 / 3.0).epsilon(1e-12));
        CHECK(rep.per_class[0].recall == Catch::Approx(2.0 / 3.0).epsilon(1e-12));
        CHECK(rep.per_class[1].precision == Catch::Approx(2.0 / 3.0).epsilon(1e-12));
        CHECK(rep.per_class[2].precision == Catch::Approx(3.0 / 4.0).epsilon(1e-12));
        CHECK(rep.per_class[2].recall == Catch::Approx(3.0 / 4.0).epsilon(1e-12));
        CHECK(rep.accuracy == Catch::Approx(0.7).epsilon(1e-12));
        // micro recall equals accuracy; supports sum to the test size
        std::size_t support = 0;
        double weighted_tp = 0.0;
        for (const auto& m : rep.per_class) {
            support += m.support;
            weighted_tp += m.recall * static_cast<double>(m.support);
        }
        CHECK(support == truth.size());
        CHECK(weighted_tp / static_cast<double>(support) ==
              Catch::Approx(rep.accuracy).epsilon(1e-12));
        const double macro =
            (rep.per_class[0].f1 + rep.per_class[1].f1 + rep.per_class[2].f1) / 3.0;
        CHECK(rep.macro_f1 == Catch::Approx(macro).epsilon(1e-12));
    }
}

TEST_CASE("train_svm: separable classes, determinism, grid argmax") {
    // three well-separated classes in 2-d
    Rng rng(37);
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    const double centers[3][2] = {{0, 0}, {8, 0}, {0, 8}};
    for (int cls = 0; cls < 3; ++cls) {
        for (int i = 0; i < 25; ++i) {
            x.push_back({centers[cls][0] + rng.normal() * 0.5,
                         centers[cls][1] + rng.normal() * 0.5});
            y.push_back(cls + 1);
        }
    }
    TrainConfig cfg;
    cfg.folds = 5;
    cfg.c_grid = {1.0, 10.0};
    cfg.rbf_gamma_grid = {0.1};
    cfg.seed = 3;
    auto res = train_svm(x, y, cfg);
    CHECK(res.test_report.macro_f1 == Catch::Approx(1.0));
    // chosen cell scores at least as well as every other cell
    for (const auto& cell : res.model.grid_report) {
        CHECK(res.model.chosen.cv_macro_f1 >= cell.cv_macro_f1);
    }
    // same seed, same choice and predictions
    auto res2 = train_svm(x, y, cfg);
    CHECK(res2.model.chosen.C == res.model.chosen.C);
    CHECK(kernel_name(res2.model.chosen.kernel) == kernel_name(res.model.chosen.kernel));
    for (const auto& xi : x) {
        CHECK(res.model.predict(xi) == res2.model.predict(xi));
    }
    // training samples predict their training labels on separable data
    std::size_t correct = 0;
    for (std::size_t i = 0; i < x.size(); ++i) correct += res.model.predict(x[i]) == y[i];
    CHECK(correct == x.size());
}

TEST_CASE("train_svm: insufficient per-class samples is an error") {
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    for (int i = 0; i < 6; ++i) {
        x.push_back({static_cast<double>(i), 0.0});
        y.push_back(i % 2);
    }
    TrainConfig cfg;
    cfg.folds = 10;  // more folds than post-split samples per class
    CHECK_THROWS(train_svm(x, y, cfg));
}

TEST_CASE("predict: out-of-vocabulary topic falls back to the country block") {
    std::vector<LabeledTopic> topics;
    // words distinguish categories 1 and 2 perfectly
    for (int i = 0; i < 12; ++i) {
        topics.push_back({{"alpha", "beta"}, i % 2 ? "GR" : "France", 1});
        topics.push_back({{"gamma", "delta"}, i % 2 ? "GR" : "France", 2});
    }
    auto fs = build_features(topics);
    TrainConfig cfg;
    cfg.folds = 4;
    cfg.c_grid = {1.0};
    cfg.kernel_grid = {KernelType::linear};
    cfg.seed = 9;
    auto res = train_svm(fs.vectors, fs.labels, cfg);
    // all-OOV words leave only the country block; the prediction is defined
    // and deterministic
    auto vec = fs.vectorizer.transform({"unseen", "words"});
    append_country_block(vec, "GR", CountryEncoding::onehot);
    const int p1 = res.model.predict(vec);
    const int p2 = res.model.predict(vec);
    CHECK(p1 == p2);
    CHECK((p1 == 1 || p1 == 2));
}

TEST_CASE("classifier fixture: held-out macro F1 at reduced grid") {
    auto topics = load_labeled_topics(std::string(EPISIGNAL_FIXTURE_DIR) +
                                      "/labeled_topics.csv");
    REQUIRE(topics.size() >= 300);
    std::set<int> classes;
    for (const auto& t : topics) classes.insert(t.category);
    CHECK(classes.size() == 7);

    auto fs = build_features(topics);
    TrainConfig cfg;
    cfg.folds = 5;  // reduced grid here; the acceptance suite runs the full one
    cfg.c_grid = {1.0, 10.0};
    cfg.rbf_gamma_grid = {0.1};
    cfg.seed = 2020;
    auto res = train_svm(fs.vectors, fs.labels, cfg);
    CHECK(res.test_report.macro_f1 >= 0.7);
}
