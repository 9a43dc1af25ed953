#pragma once

#include "clicks2line/session_store.hpp"

#include <filesystem>
#include <memory>
#include <string>

namespace c2l {

/// HTTP front end over a SessionStore.
///
///   POST /sessions                   {"image_b64", "gt_b64"?} -> {"id", "width", "height", "has_gt"}
///   POST /sessions/{id}/annotations  {"kind", "sign", "points"} -> mask state
///   POST /sessions/{id}/undo         -> mask state
///   GET  /sessions/{id}/mask         -> mask state + "annotations"
///   GET  /sessions/{id}/suggest      -> {"done", "kind", "sign", "points", "requested", "fallback"}
///   GET  /healthz
///
/// Mask state is {"width", "height", "depth", "mask_rle", "iou"?}. Errors are
/// {"error": message} with 400, 404, 409 or 502 (predictor failure).
class HttpService {
public:
    explicit HttpService(SessionStore& store, std::filesystem::path assets = {});
    ~HttpService();
    HttpService(const HttpService&) = delete;
    HttpService& operator=(const HttpService&) = delete;

    /// Binds (port 0 picks a free port) and serves on a background thread.
    /// Returns the bound port, or -1 on failure.
    int start(const std::string& host, int port);
    /// Binds and serves on the calling thread until stop().
    bool run(const std::string& host, int port);
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace c2l
