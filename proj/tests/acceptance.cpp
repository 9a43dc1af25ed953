// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failures (capped at 1).

#include "clicks2line/eval.hpp"
#include "clicks2line/io.hpp"
#include "clicks2line/line_gen.hpp"
#include "clicks2line/session_store.hpp"
#include "clicks2line/synth.hpp"
#include "oracles.hpp"
#include "stubs.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace c2l;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
    std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    std::fflush(stdout);
    failures += !ok;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

BinaryMask minus(const BinaryMask& a, const BinaryMask& b) {
    BinaryMask out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = a.data()[i] && !b.data()[i];
    return out;
}

void line_score_oracle() {
    std::mt19937 rng(1001);
    int checked = 0, bad = 0;
    const auto t0 = Clock::now();
    while (checked < 200) {
        const int s = 8 + static_cast<int>(rng() % 25);
        const int nt = 4 + static_cast<int>(rng() % 17);
        const int nr = 3 + static_cast<int>(rng() % (400 / nt - 2));
        const auto cs = gen_candidates({s, nt, nr});
        const auto target = oracle::random_blocks(rng, s, s, 1 + static_cast<int>(rng() % 3));
        const auto opp = minus(oracle::random_mask(rng, s, s, 0.08), target);
        const TargetCrop tc{target, target, opp, make_crop_transform({0, 0, s - 1, s - 1}, 0.0, s, s, s)};
        const double k = -0.5 - static_cast<double>(rng() % 200);
        const auto wm = build_weight_map(tc, k);
        if (!wm) continue;
        ++checked;
        const auto sel = select_line(cs, *wm);
        const auto ref = oracle::dense_select(cs, wm->weights);
        bad += sel.index != ref.index || sel.score != ref.score;
    }
    const double dt = seconds_since(t0);
    report(bad == 0 && dt < 10.0, "line score oracle",
           fmt("%d/%d instances bit-equal to the dense product, %.2f s", checked - bad, checked, dt));
}

void opposite_avoidance() {
    std::mt19937 rng(2002);
    int applicable = 0, bad = 0;
    for (int t = 0; t < 100; ++t) {
        const int s = 12 + static_cast<int>(rng() % 21);
        const auto cs = gen_candidates({s, 4 + static_cast<int>(rng() % 20), 4 + static_cast<int>(rng() % 20)});
        const auto target = oracle::random_blocks(rng, s, s, 2);
        const auto opp = minus(oracle::random_blocks(rng, s, s, 2), target);
        const TargetCrop tc{target, target, opp, make_crop_transform({0, 0, s - 1, s - 1}, 0.0, s, s, s)};
        const double k = -(s * std::sqrt(2.0) + 1.0);
        const auto wm = build_weight_map(tc, k);
        if (!wm) continue;
        const auto crossings = [&](std::size_t i) {
            int n = 0;
            for (const Point p : cs.line(i)) n += opp[p] != 0;
            return n;
        };
        bool clean_exists = false;
        for (std::size_t i = 0; i < cs.size() && !clean_exists; ++i) {
            if (crossings(i) != 0) continue;
            for (const Point p : cs.line(i)) clean_exists = clean_exists || target[p];
        }
        if (!clean_exists) continue;
        ++applicable;
        bad += crossings(select_line(cs, *wm).index) != 0;
    }
    report(bad == 0 && applicable > 0, "opposite-class avoidance",
           fmt("%d/%d applicable instances select a zero-crossing line", applicable - bad, applicable));
}

Region rect_region(int w, int h) {
    std::vector<Point> px;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) px.push_back({x, y});
    return make_region(std::move(px));
}

void policy_gate() {
    const Policy p;
    const Region above = rect_region(50, 10), below = rect_region(49, 10), square = rect_region(10, 10);
    const bool ok = choose_kind(above, 0, p) == InputKind::Click && choose_kind(above, 2, p) == InputKind::Line &&
                    choose_kind(below, 2, p) == InputKind::Click && choose_kind(square, 2, p) == InputKind::Click;
    report(ok, "policy gate",
           fmt("round 0 click; 50x10 (elongation %.3f) line; 49x10 (%.3f) click; square click", elongation(above),
               elongation(below)));
}

void mask_oracles() {
    std::mt19937 rng(3003);
    int dt_bad = 0, click_bad = 0, cc_bad = 0;
    for (int t = 0; t < 500; ++t) {
        const int w = 1 + static_cast<int>(rng() % 24), h = 1 + static_cast<int>(rng() % 24);
        const auto m = t % 2 ? oracle::random_mask(rng, w, h, 0.2 + 0.6 * (rng() % 100) / 100.0)
                             : oracle::random_blocks(rng, w, h, 1 + static_cast<int>(rng() % 4));
        dt_bad += !(distance_transform(m) == oracle::distance_transform(m));
        const auto cc = connected_components(m);
        const auto ref = oracle::components(m);
        bool same = cc.size() == ref.size();
        for (std::size_t i = 0; same && i < cc.size(); ++i) {
            auto a = cc[i].pixels;
            auto b = ref[i];
            const auto scan = [](Point p, Point q) { return std::pair(p.y, p.x) < std::pair(q.y, q.x); };
            std::sort(a.begin(), a.end(), scan);
            std::sort(b.begin(), b.end(), scan);
            same = a == b;
        }
        cc_bad += !same;
        for (const Region& r : cc) click_bad += place_click(r) != oracle::place_click(r.pixels);
    }
    report(dt_bad + click_bad + cc_bad == 0, "distance transform, place_click, components",
           fmt("500 masks; mismatches dt=%d click=%d cc=%d", dt_bad, click_bad, cc_bad));
}

void noc_accounting() {
    const Image img = stubs::NocScript::image();
    const LabelMask gt = oracle::to_labels(stubs::NocScript::bar());
    stubs::ScriptedPredictor pred(stubs::NocScript::masks());
    const std::vector<double> th{0.85, 0.90, 0.95};
    const auto r = run_instance("x", img, gt, pred, Policy{}, th);
    const std::vector<double> th2{0.85, 0.90, 0.97};
    const auto r2 = run_instance("x", img, gt, pred, Policy{}, th2);
    const bool ok = r.noc.size() == 3 && r.noc[0].noc == 1 && r.noc[1].noc == 3 && r.noc[2].noc == 5 &&
                    r.trace.size() == 3 && r.trace[1].annotation.kind == InputKind::Line && r2.noc[2].noc == 20 &&
                    !r2.noc[2].reached;
    report(ok, "NoC accounting",
           fmt("NoC85/90/95 = %d/%d/%d, unreached = %d", r.noc[0].noc, r.noc[1].noc, r.noc[2].noc, r2.noc[2].noc));
}

void central_claim() {
    const auto t0 = Clock::now();
    const std::vector<double> th{0.90};
    GeodesicPredictor pred;
    double sum[2][2] = {};  // [kind][strategy]
    const int n = 100;
    for (const auto kind : {ShapeKind::Bar, ShapeKind::Blob}) {
        for (int i = 0; i < n; ++i) {
            const auto inst = make_instance(42, kind, i);
            const auto gt = oracle::to_labels(inst.mask);
            for (const auto s : {Strategy::ClicksOnly, Strategy::Adaptive}) {
                const auto r = run_instance(inst.id, inst.image, gt, pred, apply_strategy(Policy{}, s), th);
                sum[kind == ShapeKind::Blob][s == Strategy::Adaptive] += r.noc[0].noc;
            }
        }
    }
    const double dt = seconds_since(t0);
    const double bc = sum[0][0] / n, ba = sum[0][1] / n, lc = sum[1][0] / n, la = sum[1][1] / n;
    const double oc = (bc + lc) / 2, oa = (ba + la) / 2;
    const bool ok = oa <= oc && bc - ba >= 0.5 && dt < 300.0;
    report(ok, "central claim (adaptive vs clicks-only NoC90)",
           fmt("bars %.2f vs %.2f, blobs %.2f vs %.2f, overall %.2f vs %.2f (adaptive vs clicks), %.1f s", ba, bc, la,
               lc, oa, oc, dt));
}

void endpoint_round_trip() {
    std::mt19937 rng(4004);
    int worst = 0;
    for (int t = 0; t < 200; ++t) {
        const int iw = 1 + static_cast<int>(rng() % 300), ih = 1 + static_cast<int>(rng() % 300);
        const int x0 = static_cast<int>(rng() % iw), y0 = static_cast<int>(rng() % ih);
        const int x1 = x0 + static_cast<int>(rng() % (iw - x0)), y1 = y0 + static_cast<int>(rng() % (ih - y0));
        const int s = 8 + static_cast<int>(rng() % 120);
        const auto tr = make_crop_transform({x0, y0, x1, y1}, (rng() % 30) / 100.0, s, iw, ih);
        for (int u = 0; u < s; ++u) {
            for (int v = 0; v < s; ++v) {
                const Point src = tr.to_source({u, v});
                if (!tr.in_image(src)) continue;
                const Point back = tr.to_crop(src);
                worst = std::max({worst, std::abs(back.x - u), std::abs(back.y - v)});
            }
        }
    }
    report(worst <= 1, "endpoint round trip", fmt("200 transforms, max drift %d crop px", worst));
}

int run_cmd(const std::string& cmd) {
    const int rc = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

void determinism() {
    const fs::path dir = fs::temp_directory_path() / "c2l_acceptance_det";
    fs::remove_all(dir);
    const std::string cli = CLI_BINARY, d = dir.string();
    bool ok = run_cmd(cli + " synth --out " + d + "/ds --count 5 --seed 7") == 0;
    ok = ok && run_cmd(cli + " evaluate --dataset " + d + "/ds --out " + d + "/a.json") == 0;
    ok = ok && run_cmd(cli + " evaluate --dataset " + d + "/ds --out " + d + "/b.json --threads 3") == 0;
    std::string detail = "CLI run failed";
    if (ok) {
        const auto a = read_text_file(dir / "a.json"), b = read_text_file(dir / "b.json");
        ok = a == b && !a.empty();
        detail = fmt("two evaluate runs, %zu bytes, %s", a.size(), ok ? "identical" : "different");
    }
    fs::remove_all(dir);
    report(ok, "determinism", detail);
}

void replay_equivalence() {
    auto pred = std::make_shared<GeodesicPredictor>();
    SessionStore store(pred, Policy{});
    std::mt19937 rng(5005);
    int ops = 0, bad = 0;
    for (int t = 0; t < 100; ++t) {
        const auto inst = make_instance(11, t % 2 ? ShapeKind::Bar : ShapeKind::Blob, t);
        const int w = inst.image.width, h = inst.image.height;
        const auto id = store.create(inst.image, oracle::to_labels(inst.mask)).id;
        std::vector<Annotation> live;
        for (int op = 0; op < 12; ++op, ++ops) {
            SessionStore::MaskState st;
            if (!live.empty() && (rng() % 3 == 0 || live.size() == 6)) {
                live.pop_back();
                st = store.undo(id);
            } else {
                const Sign s = rng() % 2 ? Sign::Positive : Sign::Negative;
                const Point a{static_cast<int>(rng() % w), static_cast<int>(rng() % h)};
                const Point b{static_cast<int>(rng() % w), static_cast<int>(rng() % h)};
                live.push_back(rng() % 2 && !(a == b) ? Annotation::line(s, a, b) : Annotation::click(s, a));
                st = store.annotate(id, live.back());
            }
            const BinaryMask fresh = live.empty() ? BinaryMask(w, h) : pred->predict({inst.image, live, nullptr});
            bad += !(st.mask == fresh) || st.depth != live.size();
        }
        store.erase(id);
    }
    report(bad == 0, "replay equivalence", fmt("%d/%d operations match a from-scratch replay", ops - bad, ops));
}

}  // namespace

int main() {
    const std::vector<std::function<void()>> checks{line_score_oracle, opposite_avoidance, policy_gate,
                                                    mask_oracles,      noc_accounting,     central_claim,
                                                    endpoint_round_trip, determinism,     replay_equivalence};
    for (const auto& c : checks) {
        try {
            c();
        } catch (const std::exception& e) {
            report(false, "check threw", e.what());
        }
    }
    return failures == 0 ? 0 : 1;
}
