"""Round trips for the three file grammars, job validation, and frozen
end-to-end runs of the command line driver."""

import contextlib
import io
import pathlib

import pytest

import trihoch.cli as cli
from trihoch.cli import (
    JobSpec, emit_quiver, emit_simplicial, emit_triangular, main,
    parse_field, parse_quiver_file, parse_simplicial_file,
    parse_triangular_file, run_job, sniff_kind,
)
from trihoch.errors import InputError, InternalInvariantError, OracleMismatch
from trihoch.exactla import GF, QQ
from trihoch.hochcomplex import DEFAULT_ORACLE_BUDGET
from trihoch.quiver import compute_levels, path_algebra

DATA = pathlib.Path(__file__).resolve().parent.parent / "data"


def read(name):
    return (DATA / name).read_text(encoding="utf-8")


def run(args):
    """Drive main() exactly as the console entry point would."""
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(args)
    return code, out.getvalue(), err.getvalue()


class TestParseField:
    def test_rationals(self):
        assert parse_field("rat") is QQ

    def test_prime_field(self):
        assert parse_field("fp:7") is GF(7)
        assert parse_field("fp:32003") is GF(32003)

    def test_unknown_spec(self):
        with pytest.raises(InputError,
                           match=r"bad field spec 'xyz'; use rat or fp:"):
            parse_field("xyz")

    def test_non_integer_prime(self):
        with pytest.raises(InputError, match=r"bad field spec 'fp:xyz'"):
            parse_field("fp:xyz")


class TestSniffKind:
    @pytest.mark.parametrize("name,kind", [
        ("branching4.quiver", "quiver"),
        ("two_by_two.tri", "triangular"),
        ("triangle_boundary.simplicial", "simplicial"),
    ])
    def test_data_files(self, name, kind):
        assert sniff_kind(read(name)) == kind

    def test_comments_and_blanks_skipped(self):
        assert sniff_kind("# comment\n\n  \nfacet 1 2\n") == "simplicial"

    def test_unknown_head(self):
        with pytest.raises(InputError, match=r"cannot determine input kind"):
            sniff_kind("poset 1 2\n")

    def test_empty(self):
        with pytest.raises(InputError, match=r"empty input"):
            sniff_kind("# nothing but comments\n")


class TestRoundTrips:
    @pytest.mark.parametrize("name", [
        "branching4.quiver", "kronecker.quiver", "chain3.quiver"])
    def test_quiver(self, name):
        q = parse_quiver_file(read(name))
        q2 = parse_quiver_file(emit_quiver(q))
        assert q2.vertices == q.vertices
        assert q2.arrows == q.arrows

    @pytest.mark.parametrize("name", ["two_by_two.tri", "branching4.tri"])
    def test_triangular(self, name):
        t = parse_triangular_file(read(name), QQ)
        assert parse_triangular_file(emit_triangular(t), QQ) == t

    @pytest.mark.parametrize("name", [
        "triangle_boundary.simplicial", "tetrahedron_boundary.simplicial"])
    def test_simplicial(self, name):
        # the emitter sorts facets, so compare as sets and require the
        # emitted form to be a fixed point
        s = parse_simplicial_file(read(name))
        text = emit_simplicial(s)
        assert sorted(parse_simplicial_file(text).facets) == sorted(s.facets)
        assert emit_simplicial(parse_simplicial_file(text)) == text

    def test_quiver_and_triangular_files_agree(self):
        # the .tri file spells out the same algebra the .quiver file
        # generates through its path basis
        q = parse_quiver_file(read("branching4.quiver"))
        from_quiver = path_algebra(q, compute_levels(q), QQ)
        from_tri = parse_triangular_file(read("branching4.tri"), QQ)
        assert from_tri == from_quiver


class TestJobSpec:
    def test_defaults(self):
        job = JobSpec("vertex a\n")
        assert job.field is QQ
        assert job.max_degree == 4
        assert job.reports == ("pages", "hochschild")
        assert job.emit == "table"
        assert job.kind is None
        assert job.oracle_budget == DEFAULT_ORACLE_BUDGET

    def test_degree_floor(self):
        with pytest.raises(InputError, match=r"max degree must be at least 1"):
            JobSpec("vertex a\n", max_degree=0)

    def test_unknown_report(self):
        with pytest.raises(InputError, match=r"unknown report 'nope'; known:"):
            JobSpec("vertex a\n", reports=("nope",))

    def test_unknown_emit(self):
        with pytest.raises(InputError, match=r"unknown output format 'csv'"):
            JobSpec("vertex a\n", emit="csv")

    def test_unknown_kind(self):
        with pytest.raises(InputError, match=r"unknown input kind 'poset'"):
            JobSpec("vertex a\n", kind="poset")

    def test_run_job_returns_text(self):
        job = JobSpec(read("kronecker.quiver"), kind="quiver",
                      max_degree=2, reports=("hochschild",))
        assert run_job(job) == "HH: 1 3\n"


BRANCHING_TABLES = (
    "[pages] r=0\n"
    "  q\\p |     0     1     2\n"
    "  -----------------------\n"
    "    4 |    34     ?     ?\n"
    "    3 |    18   484     ?\n"
    "    2 |    10   227   176\n"
    "    1 |     6    98    64\n"
    "    0 |     4    33    16\n"
    "\n"
    "[pages] r=1\n"
    "  q\\p |     0     1     2\n"
    "  -----------------------\n"
    "    4 |     0     ?     ?\n"
    "    3 |     0     0     ?\n"
    "    2 |     0     0     0\n"
    "    1 |     0     0     0\n"
    "    0 |     4    17     8\n"
    "\n"
    "[pages] r=2\n"
    "  q\\p |     0     1     2\n"
    "  -----------------------\n"
    "    4 |     0     ?     ?\n"
    "    3 |     0     0     ?\n"
    "    2 |     0     0     0\n"
    "    1 |     0     0     0\n"
    "    0 |     1     6     0\n"
    "\n"
    "[pages] r=3\n"
    "  q\\p |     0     1     2\n"
    "  -----------------------\n"
    "    4 |     0     ?     ?\n"
    "    3 |     0     0     ?\n"
    "    2 |     0     0     0\n"
    "    1 |     0     0     0\n"
    "    0 |     1     6     0\n"
    "\n"
    "HH: 1 6 0 0\n"
)

E1_REPORT = (
    "[e1-structure] projectivity hypothesis: detected\n"
    "cell p=0 q=0: labeled 4, page 4, ok   [H(A1)=1, H(A2)=1, H(A3)=2]\n"
    "cell p=0 q=1: labeled 0, page 0, ok\n"
    "cell p=0 q=2: labeled 0, page 0, ok\n"
    "cell p=0 q=3: labeled 0, page 0, ok\n"
    "cell p=0 q=4: labeled 0, page 0, ok\n"
    "cell p=1 q=0: labeled 17, page 17, ok   "
    "[Ext(M[2,1])=1, Ext(M[3,1])=8, Ext(M[3,2])=8]\n"
    "cell p=1 q=1: labeled 0, page 0, ok\n"
    "cell p=1 q=2: labeled 0, page 0, ok\n"
    "cell p=1 q=3: labeled 0, page 0, ok\n"
    "cell p=2 q=0: labeled 8, page 8, ok   [Ext(M[3,2](x)M[2,1])=8]\n"
    "cell p=2 q=1: labeled 0, page 0, ok\n"
    "cell p=2 q=2: labeled 0, page 0, ok\n"
    "agreement: all cells\n"
)

DEGENERATION_REPORT = (
    "[degeneration-check]\n"
    "tensorial: yes\n"
    "middle algebra one-dimensional: yes\n"
    "second-page differentials vanish on all reliable cells\n"
    "outer-summand classes: 9 checked, all vanish "
    "(0 skipped as non-surviving)\n"
)

ORACLE_REPORT = (
    "HH: 1 3 0\n"
    "\n"
    "[oracle-check] window 2\n"
    "degree 0: relative 1, oracle 1\n"
    "degree 1: relative 3, oracle 3\n"
    "degree 2: relative 0, oracle 0\n"
    "oracle agreement\n"
)

TRIANGLE_TSV = (
    "hochschild\t-\t-\t0\t1\n"
    "hochschild\t-\t-\t1\t1\n"
)

KRONECKER_PAGES_TSV = (
    "pages\t0\t0\t0\t2\n"
    "pages\t0\t0\t1\t2\n"
    "pages\t0\t0\t2\t2\n"
    "pages\t0\t1\t0\t4\n"
    "pages\t0\t1\t1\t8\n"
    "pages\t0\t1\t2\t?\n"
    "pages\t1\t0\t0\t2\n"
    "pages\t1\t0\t1\t0\n"
    "pages\t1\t0\t2\t0\n"
    "pages\t1\t1\t0\t4\n"
    "pages\t1\t1\t1\t0\n"
    "pages\t1\t1\t2\t?\n"
    "pages\t2\t0\t0\t1\n"
    "pages\t2\t0\t1\t0\n"
    "pages\t2\t0\t2\t0\n"
    "pages\t2\t1\t0\t3\n"
    "pages\t2\t1\t1\t0\n"
    "pages\t2\t1\t2\t?\n"
)


class TestMainGoldens:
    def test_branching_default_run(self):
        assert run([str(DATA / "branching4.quiver")]) == \
            (0, BRANCHING_TABLES, "")

    def test_single_vertex_quiver(self, tmp_path):
        p = tmp_path / "point.quiver"
        p.write_text("vertex a\n")
        assert run([str(p), "--report", "hochschild"]) == \
            (0, "HH: 1 0 0 0\n", "")

    def test_oracle_check(self):
        args = [str(DATA / "kronecker.quiver"), "--max-degree", "3",
                "--report", "hochschild,oracle-check"]
        assert run(args) == (0, ORACLE_REPORT, "")

    def test_kronecker_over_prime_field(self):
        args = [str(DATA / "kronecker.quiver"), "--max-degree", "3",
                "--report", "hochschild", "--field", "fp:32003"]
        assert run(args) == (0, "HH: 1 3 0\n", "")

    def test_e1_structure_report(self):
        args = [str(DATA / "branching4.tri"), "--report", "e1-structure"]
        assert run(args) == (0, E1_REPORT, "")

    def test_degeneration_report(self):
        args = [str(DATA / "branching4.tri"), "--report", "degeneration-check"]
        assert run(args) == (0, DEGENERATION_REPORT, "")

    def test_tsv_hochschild(self):
        args = [str(DATA / "triangle_boundary.simplicial"),
                "--max-degree", "2", "--report", "hochschild",
                "--emit", "tsv"]
        assert run(args) == (0, TRIANGLE_TSV, "")

    def test_tsv_pages(self):
        args = [str(DATA / "kronecker.quiver"), "--max-degree", "2",
                "--report", "pages", "--emit", "tsv"]
        assert run(args) == (0, KRONECKER_PAGES_TSV, "")

    def test_tsv_runs_are_deterministic(self):
        args = [str(DATA / "branching4.quiver"), "--max-degree", "3",
                "--report", "pages,hochschild", "--emit", "tsv"]
        assert run(args) == run(args)

    def test_kind_override_matches_sniffed(self):
        path = str(DATA / "chain3.quiver")
        assert run([path, "--kind", "quiver", "--report", "hochschild"]) == \
            run([path, "--report", "hochschild"])


class TestMainErrors:
    def write(self, tmp_path, text, name="in.quiver"):
        p = tmp_path / name
        p.write_text(text)
        return str(p)

    def test_unknown_vertex(self, tmp_path):
        p = self.write(tmp_path, "arrow u : a -> b\n")
        assert run([p]) == (1, "", "error: unknown vertex a at line 1\n")

    def test_duplicate_vertex(self, tmp_path):
        p = self.write(tmp_path, "vertex a\nvertex a\n")
        assert run([p]) == (1, "", "error: duplicate vertex a at line 2\n")

    def test_duplicate_arrow(self, tmp_path):
        p = self.write(tmp_path,
                       "vertex a\nvertex b\n"
                       "arrow u : a -> b\narrow u : a -> b\n")
        assert run([p]) == (1, "", "error: duplicate arrow u at line 4\n")

    def test_malformed_line(self, tmp_path):
        p = self.write(tmp_path, "arrow u a b\n")
        assert run([p]) == (1, "", "error: malformed line 1: 'arrow u a b'\n")

    def test_missing_unit(self, tmp_path):
        p = self.write(tmp_path,
                       "algebra A1 dim 1\nunit A1 : 1\nmul A1 : 0 0 0 1\n"
                       "algebra A2 dim 1\nmul A2 : 0 0 0 1\n",
                       name="in.tri")
        assert run([p]) == (1, "", "error: missing unit for A2\n")

    def test_unknown_report(self):
        code, out, err = run([str(DATA / "chain3.quiver"),
                              "--report", "nope"])
        assert (code, out) == (1, "")
        assert err == ("error: unknown report 'nope'; known: pages, "
                       "hochschild, e1-structure, oracle-check, "
                       "degeneration-check\n")

    def test_bad_field_flag(self):
        code, out, err = run([str(DATA / "chain3.quiver"),
                              "--field", "xyz"])
        assert (code, out) == (1, "")
        assert err == "error: bad field spec 'xyz'; use rat or fp:<prime>\n"

    def test_unreadable_file(self):
        code, out, err = run(["/nonexistent/file.quiver"])
        assert (code, out) == (1, "")
        assert err.startswith("error: cannot read /nonexistent/file.quiver:")

    def test_oracle_window_floor(self):
        code, out, err = run([str(DATA / "triangle_boundary.simplicial"),
                              "--max-degree", "1",
                              "--report", "oracle-check"])
        assert (code, out) == (1, "")
        assert err == "error: oracle check needs --max-degree at least 2\n"

    def test_bad_flag_value(self):
        code, out, err = run([str(DATA / "chain3.quiver"),
                              "--emit", "bogus"])
        assert (code, out) == (1, "")
        assert err.startswith("error: argument --emit: invalid choice")


class TestExitCodes:
    def test_internal_invariant_maps_to_2(self, monkeypatch, tmp_path):
        p = tmp_path / "point.quiver"
        p.write_text("vertex a\n")

        def boom(job):
            raise InternalInvariantError("differential square is nonzero")
        monkeypatch.setattr(cli, "run_job", boom)
        assert run([str(p)]) == \
            (2, "", "error: differential square is nonzero\n")

    def test_oracle_mismatch_maps_to_3(self, monkeypatch, tmp_path):
        p = tmp_path / "point.quiver"
        p.write_text("vertex a\n")

        def boom(job):
            raise OracleMismatch("relative and bar answers differ")
        monkeypatch.setattr(cli, "run_job", boom)
        assert run([str(p)]) == \
            (3, "", "error: relative and bar answers differ\n")
