#include "clicks2line/eval.hpp"
#include "clicks2line/io.hpp"
#include "clicks2line/rle.hpp"
#include "clicks2line/service.hpp"
#include "oracles.hpp"
#include "stubs.hpp"

#include <doctest.h>
#include <httplib.h>

#include <random>

using namespace c2l;
using nlohmann::json;

namespace {

Annotation click(int x, int y, Sign s = Sign::Positive) { return {InputKind::Click, s, {{x, y}}}; }

SessionStore scripted_store() {
    return SessionStore(std::make_shared<stubs::ScriptedPredictor>(stubs::NocScript::masks()), Policy{});
}

SessionStore::Info scripted_session(SessionStore& store) {
    return store.create(stubs::NocScript::image(), oracle::to_labels(stubs::NocScript::bar()));
}

SessionError::Kind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const SessionError& e) {
        return e.kind();
    }
    FAIL("no SessionError");
    return SessionError::Kind::BadRequest;
}

}  // namespace

TEST_CASE("session store") {
    auto store = scripted_store();
    const auto info = scripted_session(store);
    CHECK(info.width == 120);
    CHECK(info.has_gt);
    CHECK(store.size() == 1);
    CHECK(store.create(Image(4, 4, 1)).id != info.id);

    SUBCASE("annotate and undo move the mask stack") {
        CHECK(store.mask(info.id).depth == 0);
        CHECK(count(store.mask(info.id).mask) == 0);
        const auto s1 = store.annotate(info.id, click(60, 22));
        CHECK(s1.depth == 1);
        CHECK(*s1.iou == doctest::Approx(0.86));
        const auto s2 = store.annotate(info.id, {InputKind::Line, Sign::Positive, {{20, 10}, {70, 10}}});
        CHECK(s2.depth == 2);
        CHECK(store.annotations(info.id).size() == 2);
        const auto u = store.undo(info.id);
        CHECK(u.depth == 1);
        CHECK(u.mask == s1.mask);
        store.undo(info.id);
        CHECK(kind_of([&] { store.undo(info.id); }) == SessionError::Kind::Conflict);
    }
    SUBCASE("errors") {
        CHECK(kind_of([&] { store.mask("nope"); }) == SessionError::Kind::NotFound);
        CHECK(kind_of([&] { store.annotate(info.id, click(120, 0)); }) == SessionError::Kind::BadRequest);
        CHECK(kind_of([&] { store.annotate(info.id, {InputKind::Line, Sign::Positive, {{1, 1}}}); }) ==
              SessionError::Kind::BadRequest);
        CHECK(kind_of([&] { store.create(Image(3, 3, 1), LabelMask(4, 3)); }) == SessionError::Kind::BadRequest);
        const auto bare = store.create(Image(8, 8, 1));
        CHECK(kind_of([&] { store.suggest(bare.id); }) == SessionError::Kind::Conflict);
        CHECK_FALSE(store.mask(bare.id).iou);
        CHECK(store.erase(bare.id));
        CHECK_FALSE(store.erase(bare.id));
    }
    SUBCASE("predictor failure leaves the session alone") {
        SessionStore broken(std::make_shared<stubs::ThrowingPredictor>(), Policy{});
        const auto id = broken.create(Image(8, 8, 1)).id;
        CHECK_THROWS_AS(broken.annotate(id, click(1, 1)), PredictorError);
        CHECK(broken.mask(id).depth == 0);
    }
    SUBCASE("suggest follows the simulator") {
        const auto first = store.suggest(info.id);
        REQUIRE(first);
        CHECK(first->annotation.kind == InputKind::Click);
        CHECK(first->annotation.sign == Sign::Positive);
        store.annotate(info.id, first->annotation);
        const auto second = store.suggest(info.id);
        REQUIRE(second);
        CHECK(second->annotation.kind == InputKind::Line);
        CHECK(store.mask(info.id).depth == 1);
    }
}

TEST_CASE("replay equivalence") {
    auto pred = std::make_shared<GeodesicPredictor>();
    SessionStore store(pred, Policy{});
    std::mt19937 rng(5);
    for (int t = 0; t < 30; ++t) {
        const int w = 8 + static_cast<int>(rng() % 20), h = 8 + static_cast<int>(rng() % 20);
        Image img(w, h, 1);
        for (auto& v : img.pixels) v = static_cast<std::uint8_t>(rng() % 256);
        const auto id = store.create(img).id;
        std::vector<Annotation> live;
        for (int op = 0; op < 10; ++op) {
            SessionStore::MaskState st;
            if (!live.empty() && (rng() % 3 == 0 || live.size() == 6)) {
                live.pop_back();
                st = store.undo(id);
            } else {
                const Sign s = rng() % 2 ? Sign::Positive : Sign::Negative;
                live.push_back(click(static_cast<int>(rng() % w), static_cast<int>(rng() % h), s));
                st = store.annotate(id, live.back());
            }
            CHECK(st.depth == live.size());
            CHECK(store.annotations(id) == live);
            const BinaryMask fresh = live.empty() ? BinaryMask(w, h) : pred->predict({img, live, nullptr});
            CHECK(st.mask == fresh);
        }
    }
}

TEST_CASE("http service") {
    auto store = scripted_store();
    HttpService svc(store);
    const int port = svc.start("127.0.0.1", 0);
    REQUIRE(port > 0);
    httplib::Client cli("127.0.0.1", port);

    const auto post = [&](const std::string& path, const json& body) {
        return cli.Post(path, body.dump(), "application/json");
    };

    CHECK(cli.Get("/healthz")->status == 200);

    const json create{{"image_b64", base64_encode(encode_png(stubs::NocScript::image()))},
                      {"gt_b64", base64_encode(encode_png(mask_to_image(stubs::NocScript::bar())))}};
    auto res = post("/sessions", create);
    REQUIRE(res);
    REQUIRE(res->status == 200);
    const json info = json::parse(res->body);
    CHECK(info["width"] == 120);
    CHECK(info["height"] == 45);
    CHECK(info["has_gt"] == true);
    const std::string base = "/sessions/" + info["id"].get<std::string>();

    res = cli.Get(base + "/suggest");
    REQUIRE(res->status == 200);
    const json sug = json::parse(res->body);
    CHECK(sug["done"] == false);
    CHECK(sug["kind"] == "click");

    res = post(base + "/annotations", sug);
    REQUIRE(res->status == 200);
    json st = json::parse(res->body);
    CHECK(st["depth"] == 1);
    CHECK(st["iou"].get<double>() == doctest::Approx(0.86));
    CHECK(rle_decode(st["mask_rle"].get<std::vector<std::int64_t>>(), 120, 45) == stubs::NocScript::masks()[0]);

    // the remaining miss is a long strip along the top edge
    res = cli.Get(base + "/suggest");
    const json line = json::parse(res->body);
    CHECK(line["kind"] == "line");
    CHECK(line["sign"] == "pos");
    CHECK(line["points"].size() == 2);
    CHECK(line["fallback"] == "");

    res = cli.Get(base + "/mask");
    st = json::parse(res->body);
    CHECK(st["annotations"].size() == 1);
    CHECK(st["annotations"][0]["kind"] == "click");

    CHECK(post(base + "/undo", json::object())->status == 200);
    CHECK(post(base + "/undo", json::object())->status == 409);

    CHECK(cli.Get("/sessions/deadbeef/mask")->status == 404);
    CHECK(post("/sessions/deadbeef/annotations", sug)->status == 404);
    CHECK(cli.Post("/sessions", "{not json", "application/json")->status == 400);
    CHECK(post("/sessions", json{{"image_b64", "AAAA"}})->status == 400);
    CHECK(post(base + "/annotations", json{{"kind", "scribble"}, {"sign", "positive"}, {"points", json::array()}})
              ->status == 400);
    CHECK(post(base + "/annotations", json{{"kind", "click"}, {"sign", "positive"}, {"points", {{{"x", 500}, {"y", 0}}}}})
              ->status == 400);

    res = post("/sessions", json{{"image_b64", create["image_b64"]}});
    const std::string bare = "/sessions/" + json::parse(res->body)["id"].get<std::string>();
    CHECK(cli.Get(bare + "/suggest")->status == 409);
    CHECK_FALSE(json::parse(cli.Get(bare + "/mask")->body).contains("iou"));

    svc.stop();
}

TEST_CASE("http service reports predictor failures as 502") {
    SessionStore store(std::make_shared<stubs::ThrowingPredictor>(), Policy{});
    HttpService svc(store);
    const int port = svc.start("127.0.0.1", 0);
    REQUIRE(port > 0);
    httplib::Client cli("127.0.0.1", port);
    const auto id = store.create(Image(8, 8, 1)).id;
    const auto res = cli.Post("/sessions/" + id + "/annotations", to_json(click(1, 1)).dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == 502);
    CHECK(json::parse(res->body)["kind"] == "transport");
}
