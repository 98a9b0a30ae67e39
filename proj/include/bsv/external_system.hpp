#ifndef BSV_EXTERNAL_SYSTEM_HPP
#define BSV_EXTERNAL_SYSTEM_HPP

#include <cerrno>
#include <csignal>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include <bsv/systems.hpp>

namespace bsv {

    /// System evaluated by a child process speaking newline-delimited JSON:
    /// one request {"samples": [[...], ...]} per line on stdin, one response
    /// {"outputs": [...]} per line on stdout. The process is started lazily and
    /// must exit with status 0 when its stdin closes.
    class ExternalSystem : public SystemUnderTest {
    public:
        ExternalSystem(std::string name, std::vector<std::string> argv, OutputKind kind = OutputKind::binary, bool expensive = true)
            : _name(std::move(name)), _argv(std::move(argv)), _kind(kind), _expensive(expensive)
        {
            if (_argv.empty())
                throw invalid_input("ExternalSystem: empty command");
        }

        ExternalSystem(const ExternalSystem&) = delete;
        ExternalSystem& operator=(const ExternalSystem&) = delete;

        ~ExternalSystem() override
        {
            try {
                stop();
            }
            catch (...) {
            }
        }

        std::string name() const override { return _name; }
        OutputKind output_kind() const override { return _kind; }
        bool expensive() const override { return _expensive; }
        bool reentrant() const override { return false; }

        void initialize() override { start(); }

        /// Closes the child's stdin and waits; throws unless it exits with status 0.
        void reset() override { stop(); }

        std::vector<double> evaluate(const std::vector<SystemInput>& inputs) override
        {
            start();
            nlohmann::json req;
            req["samples"] = inputs;
            std::string line = req.dump();
            line.push_back('\n');
            write_all(line);
            std::string reply = read_line();
            nlohmann::json resp;
            try {
                resp = nlohmann::json::parse(reply);
            }
            catch (const nlohmann::json::exception& e) {
                throw std::runtime_error("external system '" + _name + "': malformed response: " + e.what());
            }
            if (!resp.is_object() || !resp.contains("outputs") || !resp["outputs"].is_array())
                throw std::runtime_error("external system '" + _name + "': response lacks an \"outputs\" array");
            std::vector<double> out;
            for (const auto& v : resp["outputs"]) {
                if (!v.is_number())
                    throw std::runtime_error("external system '" + _name + "': non-numeric output");
                out.push_back(v.get<double>());
            }
            return out;
        }

    private:
        void start()
        {
            if (_pid > 0)
                return;
            int in[2], out[2];
            if (pipe(in) != 0)
                throw std::runtime_error("external system: pipe failed");
            if (pipe(out) != 0) {
                close(in[0]);
                close(in[1]);
                throw std::runtime_error("external system: pipe failed");
            }
            pid_t pid = fork();
            if (pid < 0)
                throw std::runtime_error("external system: fork failed");
            if (pid == 0) {
                dup2(in[0], STDIN_FILENO);
                dup2(out[1], STDOUT_FILENO);
                close(in[0]);
                close(in[1]);
                close(out[0]);
                close(out[1]);
                std::vector<char*> args;
                for (auto& a : _argv)
                    args.push_back(a.data());
                args.push_back(nullptr);
                execvp(args[0], args.data());
                _exit(127);
            }
            close(in[0]);
            close(out[1]);
            _to_child = in[1];
            _from_child = out[0];
            _pid = pid;
            _buffer.clear();
            // A dead child must surface as an error, not kill us on write.
            std::signal(SIGPIPE, SIG_IGN);
        }

        void stop()
        {
            if (_pid <= 0)
                return;
            close(_to_child);
            int status = 0;
            waitpid(_pid, &status, 0);
            close(_from_child);
            _pid = -1;
            if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
                throw std::runtime_error("external system '" + _name + "' exited with nonzero status");
        }

        void write_all(const std::string& s)
        {
            std::size_t off = 0;
            while (off < s.size()) {
                ssize_t n = write(_to_child, s.data() + off, s.size() - off);
                if (n < 0) {
                    if (errno == EINTR)
                        continue;
                    throw std::runtime_error("external system '" + _name + "': write failed: " + std::strerror(errno));
                }
                off += static_cast<std::size_t>(n);
            }
        }

        std::string read_line()
        {
            for (;;) {
                auto pos = _buffer.find('\n');
                if (pos != std::string::npos) {
                    std::string line = _buffer.substr(0, pos);
                    _buffer.erase(0, pos + 1);
                    return line;
                }
                char chunk[4096];
                ssize_t n = read(_from_child, chunk, sizeof chunk);
                if (n < 0 && errno == EINTR)
                    continue;
                if (n <= 0)
                    throw std::runtime_error("external system '" + _name + "': process closed its output");
                _buffer.append(chunk, static_cast<std::size_t>(n));
            }
        }

        std::string _name;
        std::vector<std::string> _argv;
        OutputKind _kind;
        bool _expensive;
        pid_t _pid = -1;
        int _to_child = -1;
        int _from_child = -1;
        std::string _buffer;
    };

} // namespace bsv

#endif
