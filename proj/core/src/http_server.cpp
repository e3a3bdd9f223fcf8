// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sentiview Authors

#include <httplib.h>

#include <fmt/format.h>

#include "sentiview/error.hpp"
#include "sentiview/service.hpp"

namespace sentiview {

namespace {

constexpr const char* kContentType = "application/json";

void reply(httplib::Response& res, const Response& response)
{
    res.status = response.status;
    res.set_content(response.body, kContentType);
}

}  // namespace

struct HttpServer::Impl {
    explicit Impl(SearchService& svc) : service(svc) {}

    SearchService& service;
    httplib::Server server;
};

HttpServer::HttpServer(SearchService& service) : m_impl(std::make_unique<Impl>(service))
{
    auto& server = m_impl->server;
    auto& svc = m_impl->service;
    server.Get("/search", [&svc](const httplib::Request& req, httplib::Response& res) {
        std::map<std::string, std::string> params;
        for (const auto& [key, value] : req.params) {
            params.emplace(key, value);
        }
        reply(res, svc.handle_search(params));
    });
    server.Post("/events", [&svc](const httplib::Request& req, httplib::Response& res) {
        reply(res, svc.handle_event(req.body));
    });
    server.Get(R"(/report/([a-z]+))", [&svc](const httplib::Request& req, httplib::Response& res) {
        reply(res, svc.handle_report(req.matches[1].str()));
    });
    server.Get("/corpus/stats", [&svc](const httplib::Request&, httplib::Response& res) {
        reply(res, svc.handle_corpus_stats());
    });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port)
{
    auto& server = m_impl->server;
    int bound = port == 0 ? server.bind_to_any_port(host) : (server.bind_to_port(host, port) ? port : -1);
    if (bound < 0) {
        throw Error(ErrorCode::io, fmt::format("cannot bind {}:{}", host, port));
    }
    return bound;
}

void HttpServer::serve() { m_impl->server.listen_after_bind(); }

void HttpServer::stop()
{
    if (m_impl && m_impl->server.is_running()) {
        m_impl->server.stop();
    }
}

}  // namespace sentiview
