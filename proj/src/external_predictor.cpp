#include "clicks2line/predictor.hpp"

#include <httplib.h>

#include <cerrno>
#include <csignal>
#include <cstring>

#include <poll.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

namespace c2l {

namespace {

using Kind = PredictorError::Kind;

[[noreturn]] void transport_error(const std::string& what) { throw PredictorError(Kind::Transport, what); }

}  // namespace

SubprocessPredictor::SubprocessPredictor(std::string command, std::chrono::milliseconds timeout)
    : command_(std::move(command)), timeout_(timeout) {}

SubprocessPredictor::~SubprocessPredictor() { stop(); }

void SubprocessPredictor::start() {
    int sv[2];
    if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, sv) != 0) {
        transport_error(std::string("socketpair: ") + std::strerror(errno));
    }
    const pid_t pid = ::fork();
    if (pid < 0) {
        ::close(sv[0]);
        ::close(sv[1]);
        transport_error(std::string("fork: ") + std::strerror(errno));
    }
    if (pid == 0) {
        ::dup2(sv[1], STDIN_FILENO);
        ::dup2(sv[1], STDOUT_FILENO);
        ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
        ::_exit(127);
    }
    ::close(sv[1]);
    pid_ = pid;
    fd_ = sv[0];
    buffer_.clear();
}

void SubprocessPredictor::stop() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
    if (pid_ > 0) {
        // Closing the socket delivers EOF; give the child a moment before killing it.
        for (int i = 0; i < 50; ++i) {
            if (::waitpid(pid_, nullptr, WNOHANG) == pid_) {
                pid_ = -1;
                return;
            }
            ::usleep(2000);
        }
        ::kill(pid_, SIGKILL);
        ::waitpid(pid_, nullptr, 0);
        pid_ = -1;
    }
}

std::string SubprocessPredictor::roundtrip(const std::string& line) {
    if (fd_ < 0) {
        start();
    }
    std::size_t sent = 0;
    while (sent < line.size()) {
        const ssize_t n = ::send(fd_, line.data() + sent, line.size() - sent, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            stop();
            transport_error(std::string("write to predictor failed: ") + std::strerror(errno));
        }
        sent += static_cast<std::size_t>(n);
    }

    const auto deadline = std::chrono::steady_clock::now() + timeout_;
    while (true) {
        const auto nl = buffer_.find('\n');
        if (nl != std::string::npos) {
            std::string reply = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            return reply;
        }
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
            deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) {
            stop();
            transport_error("predictor timed out");
        }
        pollfd pfd{fd_, POLLIN, 0};
        const int ready = ::poll(&pfd, 1, static_cast<int>(left.count()));
        if (ready < 0 && errno == EINTR) {
            continue;
        }
        if (ready <= 0) {
            continue;
        }
        char chunk[65536];
        const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
        if (n < 0 && errno == EINTR) {
            continue;
        }
        if (n <= 0) {
            stop();
            transport_error("predictor closed its output");
        }
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

BinaryMask SubprocessPredictor::predict(const PredictRequest& request) {
    const std::string line = request_to_wire(request).dump() + "\n";
    std::string reply;
    {
        std::lock_guard lock(mu_);
        reply = roundtrip(line);
    }
    return mask_from_wire(reply, request.image.width, request.image.height);
}

HttpPredictor::HttpPredictor(std::string url, std::chrono::milliseconds timeout)
    : url_(std::move(url)), timeout_(timeout) {
    const auto scheme = url_.find("://");
    if (scheme == std::string::npos) {
        throw std::invalid_argument("http predictor URL needs a scheme: " + url_);
    }
    const auto slash = url_.find('/', scheme + 3);
    host_ = url_.substr(0, slash);
    path_ = slash == std::string::npos ? std::string() : url_.substr(slash);
    while (!path_.empty() && path_.back() == '/') {
        path_.pop_back();
    }
    if (!path_.ends_with("/predict")) {
        path_ += "/predict";
    }
}

BinaryMask HttpPredictor::predict(const PredictRequest& request) {
    const std::string body = request_to_wire(request).dump();
    std::string reply;
    {
        std::lock_guard lock(mu_);
        httplib::Client client(host_);
        client.set_connection_timeout(timeout_);
        client.set_read_timeout(timeout_);
        client.set_write_timeout(timeout_);
        auto res = client.Post(path_, body, "application/json");
        if (!res) {
            transport_error("POST " + host_ + path_ + " failed: " + httplib::to_string(res.error()));
        }
        if (res->status != 200) {
            transport_error("POST " + path_ + " returned HTTP " + std::to_string(res->status));
        }
        reply = std::move(res->body);
    }
    return mask_from_wire(reply, request.image.width, request.image.height);
}

}  // namespace c2l
