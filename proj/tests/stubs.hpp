#pragma once

#include "clicks2line/predictor.hpp"
#include "oracles.hpp"

#include <stdexcept>

namespace stubs {

using namespace c2l;

// Returns script[n - 1] after n annotations, repeating the last mask.
class ScriptedPredictor final : public Predictor {
public:
    explicit ScriptedPredictor(std::vector<BinaryMask> script) : script_(std::move(script)) {}
    std::string id() const override { return "scripted"; }
    BinaryMask predict(const PredictRequest& r) override {
        const std::size_t n = std::min(r.annotations.size(), script_.size());
        return n == 0 ? BinaryMask(r.image.width, r.image.height) : script_[n - 1];
    }

private:
    std::vector<BinaryMask> script_;
};

class ThrowingPredictor final : public Predictor {
public:
    std::string id() const override { return "throwing"; }
    BinaryMask predict(const PredictRequest&) override {
        throw PredictorError(PredictorError::Kind::Transport, "stub down");
    }
};

// 100x25 bar in a 120x45 image. The scripted masks hit IoU .86, .91 and .96,
// each time leaving an elongated false-negative strip along the top edge so
// that the second and third inputs are lines: costs 1, 3, 5.
struct NocScript {
    static constexpr int W = 120, H = 45;
    static constexpr int X0 = 10, Y0 = 10, BW = 100, BH = 25;

    static BinaryMask bar() { return oracle::rect(W, H, X0, Y0, X0 + BW - 1, Y0 + BH - 1); }

    // bar minus a rows x cols strip in its top-left corner
    static BinaryMask minus_strip(int rows, int cols) {
        BinaryMask m = bar();
        for (int y = Y0; y < Y0 + rows; ++y) {
            for (int x = X0; x < X0 + cols; ++x) {
                m(x, y) = 0;
            }
        }
        return m;
    }

    static std::vector<BinaryMask> masks() {
        return {minus_strip(5, 70), minus_strip(3, 75), minus_strip(2, 50)};
    }

    static Image image() {
        Image img(W, H, 1, 40);
        const auto b = bar();
        for (int y = 0; y < H; ++y) {
            for (int x = 0; x < W; ++x) {
                if (b(x, y)) {
                    img.at(x, y) = 200;
                }
            }
        }
        return img;
    }
};

}  // namespace stubs
