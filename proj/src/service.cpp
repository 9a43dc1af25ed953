#include "clicks2line/service.hpp"

#include "clicks2line/eval.hpp"
#include "clicks2line/io.hpp"
#include "clicks2line/rle.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <thread>

namespace c2l {

using nlohmann::json;

namespace {

json mask_state_json(const SessionStore::MaskState& st) {
    json j = {
        {"width", st.mask.width()},
        {"height", st.mask.height()},
        {"depth", st.depth},
        {"mask_rle", rle_encode(st.mask)},
    };
    if (st.iou) {
        j["iou"] = *st.iou;
    }
    return j;
}

void reply(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

template <typename F>
void guarded(httplib::Response& res, F&& f) {
    try {
        f();
    } catch (const SessionError& e) {
        const int status = e.kind() == SessionError::Kind::NotFound   ? 404
                           : e.kind() == SessionError::Kind::Conflict ? 409
                                                                      : 400;
        reply(res, status, {{"error", e.what()}});
    } catch (const PredictorError& e) {
        reply(res, 502, {{"error", e.what()}, {"kind", to_string(e.kind())}});
    } catch (const json::exception& e) {
        reply(res, 400, {{"error", std::string("bad JSON: ") + e.what()}});
    } catch (const std::invalid_argument& e) {
        reply(res, 400, {{"error", e.what()}});
    } catch (const IoError& e) {
        reply(res, 400, {{"error", e.what()}});
    } catch (const std::exception& e) {
        reply(res, 500, {{"error", e.what()}});
    }
}

}  // namespace

struct HttpService::Impl {
    SessionStore& store;
    httplib::Server server;
    std::thread thread;

    explicit Impl(SessionStore& s) : store(s) {}
};

HttpService::HttpService(SessionStore& store, std::filesystem::path assets)
    : impl_(std::make_unique<Impl>(store)) {
    auto& srv = impl_->server;
    SessionStore& st = store;

    srv.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
        reply(res, 200, {{"status", "ok"}});
    });

    srv.Post("/sessions", [&st](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const json body = json::parse(req.body);
            if (!body.is_object() || !body.contains("image_b64") || !body["image_b64"].is_string()) {
                throw SessionError(SessionError::Kind::BadRequest, "image_b64 (PNG, base64) is required");
            }
            Image image = decode_png(base64_decode(body["image_b64"].get<std::string>()));
            std::optional<LabelMask> gt;
            if (body.contains("gt_b64") && !body["gt_b64"].is_null()) {
                gt = decode_label_mask(decode_png(base64_decode(body["gt_b64"].get<std::string>())));
            }
            const auto info = st.create(std::move(image), std::move(gt));
            reply(res, 200, {{"id", info.id}, {"width", info.width}, {"height", info.height}, {"has_gt", info.has_gt}});
        });
    });

    srv.Post("/sessions/:id/annotations", [&st](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            Annotation a;
            try {
                a = annotation_from_json(json::parse(req.body));
            } catch (const std::invalid_argument& e) {
                throw SessionError(SessionError::Kind::BadRequest, e.what());
            }
            reply(res, 200, mask_state_json(st.annotate(req.path_params.at("id"), a)));
        });
    });

    srv.Post("/sessions/:id/undo", [&st](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] { reply(res, 200, mask_state_json(st.undo(req.path_params.at("id")))); });
    });

    srv.Get("/sessions/:id/mask", [&st](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const auto& id = req.path_params.at("id");
            json j = mask_state_json(st.mask(id));
            json list = json::array();
            for (const auto& a : st.annotations(id)) {
                list.push_back(to_json(a));
            }
            j["annotations"] = std::move(list);
            reply(res, 200, j);
        });
    });

    srv.Get("/sessions/:id/suggest", [&st](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const auto proposal = st.suggest(req.path_params.at("id"));
            if (!proposal) {
                reply(res, 200, {{"done", true}});
                return;
            }
            json j = to_json(proposal->annotation);
            j["done"] = false;
            j["requested"] = to_string(proposal->requested);
            j["fallback"] = proposal->fallback;
            reply(res, 200, j);
        });
    });

    if (!assets.empty()) {
        if (!srv.set_mount_point("/", assets.string())) {
            spdlog::warn("assets directory {} not found; static files disabled", assets.string());
        }
    }
}

HttpService::~HttpService() { stop(); }

int HttpService::start(const std::string& host, int port) {
    auto& srv = impl_->server;
    const int bound = port == 0 ? srv.bind_to_any_port(host) : (srv.bind_to_port(host, port) ? port : -1);
    if (bound < 0) {
        return -1;
    }
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return bound;
}

bool HttpService::run(const std::string& host, int port) { return impl_->server.listen(host, port); }

void HttpService::stop() {
    impl_->server.stop();
    if (impl_->thread.joinable()) {
        impl_->thread.join();
    }
}

}  // namespace c2l
