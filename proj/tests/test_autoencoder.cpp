#include "tonal/autoencoder.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include "doctest.h"
#include "tonal/errors.hpp"
#include "tonal/rng.hpp"
#include "tonal/synth.hpp"

namespace fs = std::filesystem;
using namespace tonal;

namespace {

std::vector<double> random_contour(std::mt19937_64& rng) {
    std::vector<double> v(ae::kInputLen);
    for (double& x : v) x = uniform01(rng);
    return v;
}

double reconstruction_mse(const ae::Model& model, const std::vector<double>& x) {
    const std::vector<double> y = ae::decode(model, ae::encode(model, x));
    double mse = 0.0;
    for (int i = 0; i < ae::kInputLen; ++i) mse += (y[i] - x[i]) * (y[i] - x[i]);
    return mse / ae::kInputLen;
}

// mean reconstruction MSE over a batch, as a plain function of the
// parameter vector; drives the finite-difference check
double batch_loss(ae::Model model, const std::vector<double>& params,
                  const std::vector<std::vector<double>>& batch) {
    ae::set_params(model, params);
    double total = 0.0;
    for (const auto& x : batch) total += reconstruction_mse(model, x);
    return total / static_cast<double>(batch.size());
}

// the synthetic 4-tone fixture and the model trained on it, shared by the
// slow training-dependent cases below
struct TrainedFixture {
    std::vector<std::vector<double>> values;
    std::vector<std::string> tones;
    ae::Model model;
    std::vector<double> loss_history;

    TrainedFixture() : model(ae::build_model(derive_seed(1, "init"))) {
        synth::SynthConfig cfg;
        cfg.seed = 7;
        for (const auto& lc : synth::gen_contour_corpus(cfg)) {
            values.push_back(lc.contour.values);
            tones.push_back(*lc.tone);
        }
        ae::TrainConfig tc;
        tc.seed = derive_seed(1, "train");
        loss_history = ae::train(model, values, tc).loss_history;
    }
};

const TrainedFixture& trained_fixture() {
    static const TrainedFixture fixture;
    return fixture;
}

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() / ("tonal_ae_test_" + std::to_string(counter++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("build_model: seeded init is reproducible, seeds differ") {
    const ae::Model a = ae::build_model(42);
    const ae::Model b = ae::build_model(42);
    const ae::Model c = ae::build_model(43);
    CHECK(ae::flatten_params(a) == ae::flatten_params(b));
    CHECK(ae::flatten_params(a) != ae::flatten_params(c));
}

TEST_CASE("model has 231 parameters in a flat round-trippable vector") {
    ae::Model model = ae::build_model(7);
    CHECK(ae::param_count(model) == 231);
    const std::vector<double> params = ae::flatten_params(model);
    REQUIRE(params.size() == 231);

    std::vector<double> shifted = params;
    for (double& p : shifted) p += 0.125;
    ae::set_params(model, shifted);
    CHECK(ae::flatten_params(model) == shifted);
    CHECK_THROWS_AS(ae::set_params(model, std::vector<double>(230, 0.0)),
                    ShapeMismatch);
}

TEST_CASE("shape chain 40 -> 37 -> 18 -> 15 -> 7 -> 2 -> 28 -> 18 -> 40") {
    std::mt19937_64 rng(3);
    const ae::Model model = ae::build_model(11);
    const ae::ForwardCache cache = ae::forward(model, random_contour(rng));
    CHECK(cache.x.length == 40);
    CHECK(cache.c1.channels == 2);
    CHECK(cache.c1.length == 37);
    CHECK(cache.m1.y.length == 18);
    CHECK(cache.c2.channels == 4);
    CHECK(cache.c2.length == 15);
    CHECK(cache.m2.y.length == 7);
    CHECK(cache.z.length == 2);
    CHECK(cache.d.length == 28);
    CHECK(cache.t1.channels == 2);
    CHECK(cache.t1.length == 18);
    CHECK(cache.t2.channels == 1);
    CHECK(cache.t2.length == 40);
    CHECK(cache.y.length == 40);
}

TEST_CASE("encode: pure 2-vector; decode: 40 values strictly inside (0,1)") {
    std::mt19937_64 rng(5);
    const ae::Model model = ae::build_model(17);
    const std::vector<double> x = random_contour(rng);
    const auto z1 = ae::encode(model, x);
    const auto z2 = ae::encode(model, x);
    CHECK(z1 == z2);
    CHECK(std::isfinite(z1[0]));
    CHECK(std::isfinite(z1[1]));

    const std::vector<double> y = ae::decode(model, z1);
    REQUIRE(y.size() == 40);
    for (double v : y) {
        CHECK(v > 0.0);
        CHECK(v < 1.0);
    }
    CHECK_THROWS_AS(ae::encode(model, std::vector<double>(39, 0.5)), ShapeMismatch);
}

TEST_CASE("end-to-end gradient matches finite differences on a 3-sample batch") {
    std::mt19937_64 rng(23);
    std::vector<std::vector<double>> batch;
    for (int s = 0; s < 3; ++s) batch.push_back(random_contour(rng));
    ae::Model model = ae::build_model(29);
    const std::vector<double> params = ae::flatten_params(model);

    // analytic: mean over samples of dMSE/dparams
    std::vector<double> analytic(params.size(), 0.0);
    for (const auto& x : batch) {
        const ae::ForwardCache cache = ae::forward(model, x);
        nn::Tensor target(1, ae::kInputLen);
        target.data = x;
        const nn::MseResult mse = nn::mse_loss(cache.y, target);
        const ae::ModelGrads grads = ae::backward(model, cache, mse.grad_pred);
        const std::vector<double> flat = ae::flatten_grads(model, grads);
        for (std::size_t i = 0; i < flat.size(); ++i) {
            analytic[i] += flat[i] / static_cast<double>(batch.size());
        }
    }

    const double h = 1e-6;
    double worst = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
        std::vector<double> plus = params, minus = params;
        plus[i] += h;
        minus[i] -= h;
        const double fd = (batch_loss(model, plus, batch) - batch_loss(model, minus, batch)) /
                          (2.0 * h);
        const double scale = std::max({std::abs(fd), std::abs(analytic[i]), 1e-8});
        worst = std::max(worst, std::abs(fd - analytic[i]) / scale);
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("train: one loss entry per epoch, deterministic for a fixed seed") {
    std::mt19937_64 rng(31);
    std::vector<std::vector<double>> corpus;
    for (int i = 0; i < 10; ++i) corpus.push_back(random_contour(rng));

    ae::TrainConfig cfg;
    cfg.epochs = 5;
    cfg.batch_size = 4;  // 10 samples -> batches of 4, 4, 2
    cfg.seed = 77;
    ae::Model a = ae::build_model(1);
    ae::Model b = ae::build_model(1);
    const ae::TrainResult ra = ae::train(a, corpus, cfg);
    const ae::TrainResult rb = ae::train(b, corpus, cfg);

    CHECK(ra.loss_history.size() == 5);
    CHECK(ra.loss_history == rb.loss_history);
    CHECK(ae::flatten_params(a) == ae::flatten_params(b));

    ae::Model c = ae::build_model(1);
    ae::TrainConfig other = cfg;
    other.seed = 78;
    const ae::TrainResult rc = ae::train(c, corpus, other);
    CHECK(ra.loss_history != rc.loss_history);  // shuffle order actually used
}

TEST_CASE("train: zero learning rate changes nothing") {
    std::mt19937_64 rng(37);
    std::vector<std::vector<double>> corpus;
    for (int i = 0; i < 6; ++i) corpus.push_back(random_contour(rng));
    ae::Model model = ae::build_model(2);
    const std::vector<double> before = ae::flatten_params(model);

    ae::TrainConfig cfg;
    cfg.epochs = 3;
    cfg.lr = 0.0;
    const ae::TrainResult r = ae::train(model, corpus, cfg);
    CHECK(ae::flatten_params(model) == before);
    REQUIRE(r.loss_history.size() == 3);
    CHECK(r.loss_history[1] == r.loss_history[0]);
    CHECK(r.loss_history[2] == r.loss_history[0]);
}

TEST_CASE("train: invalid inputs are rejected") {
    ae::Model model = ae::build_model(3);
    CHECK_THROWS_AS(ae::train(model, {}, {}), DataError);

    std::vector<std::vector<double>> corpus = {std::vector<double>(40, 0.5)};
    ae::TrainConfig bad;
    bad.batch_size = 0;
    CHECK_THROWS_AS(ae::train(model, corpus, bad), ConfigError);

    std::vector<std::vector<double>> poisoned = {
        std::vector<double>(40, std::nan(""))};
    ae::TrainConfig one_epoch;
    one_epoch.epochs = 1;
    CHECK_THROWS_AS(ae::train(model, poisoned, one_epoch), NonFiniteLoss);
}

TEST_CASE("training on a single contour memorizes it") {
    const std::vector<double> x = trained_fixture().values[0];

    // at the default hyperparameters Adam's per-step travel is ~lr, so 500
    // steps cannot reach machine-level memorization; measured final loss
    // for this seed is 0.0624 from a 0.268 start
    ae::Model slow = ae::build_model(derive_seed(2, "init"));
    ae::TrainConfig cfg;
    cfg.seed = derive_seed(2, "train");
    const ae::TrainResult rs = ae::train(slow, {x}, cfg);
    CHECK(rs.loss_history.back() < 0.08);
    CHECK(rs.loss_history.back() < 0.5 * rs.loss_history.front());

    // with a larger step budget the same model does memorize (measured
    // 0.0028 at lr 2e-2); guards against silent gradient-path regressions
    ae::Model fast = ae::build_model(derive_seed(2, "init"));
    ae::TrainConfig big = cfg;
    big.lr = 2e-2;
    const ae::TrainResult rf = ae::train(fast, {x}, big);
    CHECK(rf.loss_history.back() < 5e-3);
}

TEST_CASE("fixture training reaches its measured plateau") {
    // measured on this exact fixture/seed: final epoch loss 0.013138; the
    // bound leaves ~20% headroom while still catching any real regression
    const auto& fx = trained_fixture();
    REQUIRE(fx.loss_history.size() == 500);
    CHECK(fx.loss_history.back() < 0.016);
    CHECK(fx.loss_history.back() < fx.loss_history.front());
}

TEST_CASE("fixture loss curve: no 50-epoch window rises more than 5%") {
    const auto& fx = trained_fixture();
    for (std::size_t i = 50; i + 50 < fx.loss_history.size(); ++i) {
        CHECK(fx.loss_history[i + 50] <= fx.loss_history[i] * 1.05);
    }
}

TEST_CASE("post-training reconstructions stay within the trained ceiling") {
    const auto& fx = trained_fixture();
    double mean_mse = 0.0;
    for (const auto& x : fx.values) mean_mse += reconstruction_mse(fx.model, x);
    mean_mse /= static_cast<double>(fx.values.size());
    CHECK(mean_mse < 0.016);
    CHECK(mean_mse <= fx.loss_history.back() * 1.05);
}

TEST_CASE("trained latent space: intra-tone distances below inter-tone") {
    const auto& fx = trained_fixture();
    std::vector<std::array<double, 2>> z;
    z.reserve(fx.values.size());
    for (const auto& v : fx.values) z.push_back(ae::encode(fx.model, v));

    double intra = 0.0, inter = 0.0;
    long n_intra = 0, n_inter = 0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        for (std::size_t j = i + 1; j < z.size(); ++j) {
            const double d = std::hypot(z[i][0] - z[j][0], z[i][1] - z[j][1]);
            if (fx.tones[i] == fx.tones[j]) {
                intra += d;
                ++n_intra;
            } else {
                inter += d;
                ++n_inter;
            }
        }
    }
    const double mean_intra = intra / static_cast<double>(n_intra);
    const double mean_inter = inter / static_cast<double>(n_inter);
    CHECK(mean_intra < mean_inter);  // measured: 0.195 vs 1.695
}

TEST_CASE("checkpoint: save/load round trip is exact") {
    TempDir dir;
    const fs::path path = dir.path / "model.json";
    const ae::Model model = ae::build_model(55);
    ae::save_checkpoint(model, path);
    const ae::Model loaded = ae::load_checkpoint(path);
    CHECK(ae::flatten_params(loaded) == ae::flatten_params(model));

    // a trained model round-trips too (exercises non-init values)
    const auto& fx = trained_fixture();
    const fs::path trained_path = dir.path / "trained.json";
    ae::save_checkpoint(fx.model, trained_path);
    CHECK(ae::flatten_params(ae::load_checkpoint(trained_path)) ==
          ae::flatten_params(fx.model));
}

TEST_CASE("checkpoint: missing and malformed files are reported") {
    TempDir dir;
    CHECK_THROWS_AS(ae::load_checkpoint(dir.path / "absent.json"), MissingFile);

    const fs::path garbage = dir.path / "garbage.json";
    std::ofstream(garbage) << "{not json";
    CHECK_THROWS_AS(ae::load_checkpoint(garbage), DataError);

    const fs::path wrong_version = dir.path / "wrong_version.json";
    std::ofstream(wrong_version) << R"({"format_version": 99, "layers": []})";
    CHECK_THROWS_AS(ae::load_checkpoint(wrong_version), DataError);
}
