"""
Tests for the command-line toolkit, driven through main(argv).
"""
import threading

import pytest

from revocable_abe.app.commands import suggest_user, split_names
from revocable_abe.app.main import EXIT_CRYPTO, EXIT_IO, EXIT_OK, EXIT_USAGE, main
from revocable_abe.core.models import UserRegistry
from revocable_abe.proxy import ProxyConfig, make_proxy_server

TOKEN = "cli-token"
PAYLOAD = b"the quarterly numbers"


class CliWorkspace:
    """Files of one authority under a temporary directory."""

    def __init__(self, root, mode="key", attrs=""):
        self.root = root
        self.keys = root / "keys"
        argv = ["setup", "--max-revoked", "2", "--mode", mode, "--out-dir", str(self.keys)]
        if attrs:
            argv += ["--attrs", attrs]
        assert main(argv) == EXIT_OK
        self.plain = root / "plain.txt"
        self.plain.write_bytes(PAYLOAD)

    @property
    def pk(self):
        return str(self.keys / "public.pk")

    @property
    def mk(self):
        return str(self.keys / "master.mk")

    @property
    def pxk(self):
        return str(self.keys / "proxy.pxk")

    def path(self, name):
        return str(self.root / name)

    def keygen(self, user, attrs):
        return main(["keygen", "--mk", self.mk, "--user", user, "--attrs", attrs, "--out", self.path(f"{user}.sk")])

    def enc(self, policy, out="msg.ct"):
        return main(["enc", "--pk", self.pk, "--policy", policy, "--in", str(self.plain), "--out", self.path(out)])

    def dec(self, key, *conversion, ct="msg.ct"):
        out = self.root / f"{key}.out"
        code = main(["dec", "--sk", self.path(key), "--in", self.path(ct), "--out", str(out), *conversion])
        return code, (out.read_bytes() if code == EXIT_OK else None)


class TestKeyModePipeline:
    """setup, keygen, enc, dec and revoke with offline proxy keys."""

    def workspace(self, tmp_path):
        ws = CliWorkspace(tmp_path)
        assert ws.keygen("alice", "friend,neighbor") == EXIT_OK
        assert ws.keygen("bob", "friend,neighbor") == EXIT_OK
        assert ws.enc("friend and neighbor") == EXIT_OK
        return ws

    def test_setup_writes_files(self, tmp_path):
        """Test setup creates the three artifacts."""
        ws = CliWorkspace(tmp_path)
        assert {p.name for p in ws.keys.iterdir()} == {"public.pk", "master.mk", "proxy.pxk"}

    def test_decrypt(self, tmp_path):
        """Test a user decrypts with the initial proxy key."""
        ws = self.workspace(tmp_path)
        assert ws.dec("alice.sk", "--pxk", ws.pxk) == (EXIT_OK, PAYLOAD)

    def test_revoke_then_decrypt(self, tmp_path, capsys):
        """Test a revoked user exits 2 while others still decrypt."""
        ws = self.workspace(tmp_path)
        revoked = ws.path("revoked.pxk")
        assert main(["revoke", "--mk", ws.mk, "--users", "alice", "--out", revoked]) == EXIT_OK
        capsys.readouterr()
        code, _ = ws.dec("alice.sk", "--pxk", revoked)
        assert code == EXIT_CRYPTO
        assert "revoked" in capsys.readouterr().err
        assert ws.dec("bob.sk", "--pxk", revoked) == (EXIT_OK, PAYLOAD)

    def test_unrevoke(self, tmp_path):
        """Test an empty user list restores access."""
        ws = self.workspace(tmp_path)
        main(["revoke", "--mk", ws.mk, "--users", "alice", "--out", ws.path("r1.pxk")])
        assert main(["revoke", "--mk", ws.mk, "--out", ws.path("r2.pxk")]) == EXIT_OK
        assert ws.dec("alice.sk", "--pxk", ws.path("r2.pxk")) == (EXIT_OK, PAYLOAD)

    def test_not_satisfied(self, tmp_path, capsys):
        """Test a key missing an attribute exits 2."""
        ws = self.workspace(tmp_path)
        ws.keygen("carol", "friend")
        code, _ = ws.dec("carol.sk", "--pxk", ws.pxk)
        assert code == EXIT_CRYPTO
        assert "not satisfied" in capsys.readouterr().err

    def test_malformed_policy(self, tmp_path, capsys):
        """Test a policy syntax error exits 1 with its position."""
        ws = CliWorkspace(tmp_path)
        assert ws.enc("friend and") == EXIT_USAGE
        assert "position 10" in capsys.readouterr().err

    def test_unknown_user_suggestion(self, tmp_path, capsys):
        """Test a misspelled user name gets a suggestion."""
        ws = self.workspace(tmp_path)
        code = main(["revoke", "--mk", ws.mk, "--users", "alicee", "--out", ws.path("r.pxk")])
        assert code == EXIT_USAGE
        assert "did you mean 'alice'" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        """Test an unreadable input exits 3."""
        ws = CliWorkspace(tmp_path)
        code = main(["enc", "--pk", ws.path("nope.pk"), "--policy", "friend",
                     "--in", str(ws.plain), "--out", ws.path("x.ct")])
        assert code == EXIT_IO

    def test_wrong_component(self, tmp_path):
        """Test passing a proxy key where a public key belongs exits 3."""
        ws = CliWorkspace(tmp_path)
        code = main(["enc", "--pk", ws.pxk, "--policy", "friend", "--in", str(ws.plain), "--out", ws.path("x.ct")])
        assert code == EXIT_IO

    def test_conversion_flags_exclusive(self, tmp_path):
        """Test --proxy and --pxk together are a usage error."""
        ws = self.workspace(tmp_path)
        with pytest.raises(SystemExit) as info:
            main(["dec", "--sk", ws.path("alice.sk"), "--in", ws.path("msg.ct"), "--out", ws.path("o"),
                  "--pxk", ws.pxk, "--proxy", "http://127.0.0.1:1"])
        assert info.value.code == EXIT_USAGE

    def test_revoke_needs_destination(self, tmp_path):
        """Test revoke without --out or --push."""
        ws = self.workspace(tmp_path)
        assert main(["revoke", "--mk", ws.mk, "--users", "alice"]) == EXIT_USAGE

    def test_delegate_single(self, tmp_path):
        """Test a delegated subset key decrypts through the proxy key it was derived against."""
        ws = self.workspace(tmp_path)
        assert ws.enc("friend", out="friend.ct") == EXIT_OK
        code = main(["delegate", "--sk", ws.path("alice.sk"), "--attrs", "friend", "--pk", ws.pk,
                     "--pxk", ws.pxk, "--out", ws.path("dave.sk")])
        assert code == EXIT_OK
        assert ws.dec("dave.sk", "--pxk", ws.pxk, ct="friend.ct") == (EXIT_OK, PAYLOAD)


class TestAttrModePipeline:
    """Per-attribute revocation through the CLI."""

    def test_reroute_and_block(self, tmp_path, capsys):
        """Test revoking one attribute blocks AND policies but not OR policies."""
        ws = CliWorkspace(tmp_path, mode="attr", attrs="friend,neighbor")
        assert ws.keygen("alice", "friend,neighbor") == EXIT_OK
        assert ws.enc("friend or neighbor", out="or.ct") == EXIT_OK
        assert ws.enc("friend and neighbor", out="and.ct") == EXIT_OK
        revoked = ws.path("revoked.pxk")
        assert main(["revoke", "--mk", ws.mk, "--attribute", "friend", "--users", "alice", "--out", revoked]) == EXIT_OK
        assert ws.dec("alice.sk", "--pxk", revoked, ct="or.ct") == (EXIT_OK, PAYLOAD)
        capsys.readouterr()
        code, _ = ws.dec("alice.sk", "--pxk", revoked, ct="and.ct")
        assert code == EXIT_CRYPTO
        assert "revoked" in capsys.readouterr().err

    def test_attribute_required(self, tmp_path):
        """Test per-attribute revoke without --attribute."""
        ws = CliWorkspace(tmp_path, mode="attr", attrs="friend")
        ws.keygen("alice", "friend")
        assert main(["revoke", "--mk", ws.mk, "--users", "alice", "--out", ws.path("r.pxk")]) == EXIT_USAGE


class TestLiveProxy:
    """revoke --push and dec --proxy against a running service."""

    def setup_method(self):
        self.server = None

    def teardown_method(self):
        if self.server is not None:
            self.server.shutdown()
            self.server.server_close()

    def test_push_and_decrypt(self, tmp_path, capsys):
        """Test pushing a revocation takes effect for the next decryption."""
        ws = CliWorkspace(tmp_path)
        ws.keygen("alice", "friend")
        ws.enc("friend")
        config = ProxyConfig(admin_token=TOKEN, listen="127.0.0.1:0", proxy_key_path=ws.pxk)
        self.server = make_proxy_server(config)
        threading.Thread(target=self.server.serve_forever, daemon=True).start()
        url = f"http://127.0.0.1:{self.server.server_port}"

        assert ws.dec("alice.sk", "--proxy", url) == (EXIT_OK, PAYLOAD)
        code = main(["revoke", "--mk", ws.mk, "--users", "alice", "--push", url, "--token", TOKEN])
        assert code == EXIT_OK
        capsys.readouterr()
        code, _ = ws.dec("alice.sk", "--proxy", url)
        assert code == EXIT_CRYPTO
        assert "revoked" in capsys.readouterr().err

    def test_push_needs_token(self, tmp_path, monkeypatch):
        """Test --push without a token is a usage error."""
        monkeypatch.delenv("REVABE_PROXY_TOKEN", raising=False)
        ws = CliWorkspace(tmp_path)
        ws.keygen("alice", "friend")
        assert main(["revoke", "--mk", ws.mk, "--users", "alice", "--push", "http://127.0.0.1:1"]) == EXIT_USAGE


class TestHelpers:
    """Tests for small CLI helpers."""

    def test_split_names(self):
        """Test names keep order and case and drop blanks."""
        assert split_names(" Bob, alice,,") == ["Bob", "alice"]
        assert split_names(None) == []

    def test_suggest_user(self):
        """Test fuzzy suggestions honor the cutoff."""
        registry = UserRegistry({"alice": 5, "bob": 7})
        assert suggest_user(registry, "alicee") == "alice"
        assert suggest_user(registry, "zed") is None
