import io

import pytest

from errors import ConfigurationError, InputError
from graph_space import build_graph
from io_formats import (
    atomic_output,
    is_sample_file,
    load_bytes,
    read_distribution,
    read_edge_list,
    read_graph,
    read_id_list,
    read_points,
    read_sample,
    write_distribution,
    write_edge_list,
    write_sample,
)
from metrics import CumulativeDistribution, cumulative_degree_distribution
from sampler import SamplerConfig, sample
from vector_space import PointSet


def text(s: str) -> io.BytesIO:
    return io.BytesIO(s.encode("utf-8"))


class TestEdgeList:
    def test_tab_separated(self):
        assert read_edge_list(text("a\tb\t3\n")) == [("a", "b", 3.0)]

    def test_comma_separated(self):
        assert read_edge_list(text("a,b,3\nb,c,1.5\n")) == [("a", "b", 3.0), ("b", "c", 1.5)]

    def test_comments_blank_lines_and_bom(self):
        data = "\ufeff# weighted co-occurrence\n\na,b,2\n  # trailing note\nc,b,1\r\n"
        assert read_edge_list(text(data)) == [("a", "b", 2.0), ("c", "b", 1.0)]

    def test_text_stream(self):
        assert read_edge_list(io.StringIO("x,y,1\n")) == [("x", "y", 1.0)]

    def test_field_count(self):
        with pytest.raises(InputError, match="line 2") as info:
            read_edge_list(text("a,b,1\na,b\n"))
        assert info.value.content == "a,b"

    def test_weight_not_a_number(self):
        with pytest.raises(InputError, match="line 1: weight is not a number"):
            read_edge_list(text("a,b,x\n"))

    @pytest.mark.parametrize("weight", ["0", "-2", "nan", "inf"])
    def test_weight_not_positive(self, weight):
        with pytest.raises(InputError, match="line 1"):
            read_edge_list(text(f"a,b,{weight}\n"))

    def test_invalid_utf8(self):
        with pytest.raises(InputError, match="line 2"):
            read_edge_list(io.BytesIO(b"a,b,1\n\xff,b,1\n"))

    def test_graph_errors_point_at_file_lines(self):
        with pytest.raises(InputError, match="line 4: duplicate edge"):
            read_graph(text("# header\na,b,1\nb,c,1\nb,a,1\n"))

    def test_self_loop_line(self):
        with pytest.raises(InputError, match="line 3: self-loop"):
            read_graph(text("a,b,1\n\nc,c,1\n"))

    def test_read_graph(self, four_node_edges):
        data = "".join(f"{u}\t{v}\t{w}\n" for u, v, w in four_node_edges)
        g = read_graph(text(data))
        assert g.labels == ("a", "b", "c", "d") and g.edge_count == 4

    def test_write_edge_list_reads_back(self, four_node_graph):
        out = io.StringIO()
        write_edge_list(four_node_graph, out)
        lines = out.getvalue().splitlines()
        assert lines[:2] == ["# nodes: 4", "# edges: 4"]
        assert lines[2] == "a\tb\t3"
        assert read_graph(io.StringIO(out.getvalue())) == four_node_graph


class TestPoints:
    def test_plain(self):
        ps = read_points(text("0,0\n0,40\n0,90\n"))
        assert ps.coordinates.tolist() == [[0, 0], [0, 40], [0, 90]]
        assert ps.labels is None

    def test_whitespace_separated(self):
        ps = read_points(text("  1.5   2\n3 4\n"))
        assert ps.coordinates.tolist() == [[1.5, 2.0], [3.0, 4.0]]

    def test_header_without_ids(self):
        ps = read_points(text("x,y\n1,2\n"))
        assert ps.size == 1 and ps.labels is None

    def test_id_column(self):
        ps = read_points(text("id\tx\ty\np7\t1\t2\np9\t3\t4\n"))
        assert ps.labels == ("p7", "p9")
        assert ps.coordinates.tolist() == [[1, 2], [3, 4]]

    def test_partly_numeric_first_line_is_data(self):
        with pytest.raises(InputError, match="line 1: coordinate is not a number"):
            read_points(text("1,x\n2,3\n4,5\n"))

    @pytest.mark.parametrize("bad_id", ["a,1", "a, 1"])
    def test_ids_with_commas(self, bad_id):
        with pytest.raises(InputError, match="line 3"):
            read_points(text(f"id\tx\ty\nb\t1\t1\n{bad_id}\t0\t0\n"))

    def test_point_ids_survive_a_sample_file(self):
        ps = read_points(text("id\tx\ty\tz\na-1\t1\t0\t0\nb 2\t0\t1\t0\n"))
        result = sample(ps, SamplerConfig(log_base=2, radius=5, step=1))
        buf = io.BytesIO()
        write_sample(result, buf)
        parsed = read_sample(io.BytesIO(buf.getvalue()))
        assert parsed.members == ("a-1", "b 2")
        assert parsed.coordinates == ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0))

    def test_duplicate_ids(self):
        with pytest.raises(InputError, match="unique"):
            read_points(text("id,x\nq,1\nq,2\n"))

    def test_field_count(self):
        with pytest.raises(InputError, match="line 3: expected 2 fields, found 3"):
            read_points(text("1,2\n3,4\n5,6,7\n"))

    @pytest.mark.parametrize("bad", ["nan", "inf", "-inf", "one"])
    def test_bad_coordinate(self, bad):
        with pytest.raises(InputError, match="line 2"):
            read_points(text(f"1,2\n{bad},4\n"))

    def test_empty(self):
        assert read_points(text("# nothing here\n")).size == 0


def test_read_id_list():
    assert read_id_list(text("# region\na\n\n c \n")) == ["a", "c"]


class TestSampleFile:
    def test_graph_sample(self, four_node_graph):
        result = sample(four_node_graph, SamplerConfig(log_base=2), dataset_id="four.csv")
        out = io.StringIO()
        write_sample(result, out)
        head, body = out.getvalue().split("\n\n")
        assert head.splitlines() == [
            "format: nn-sample/1",
            "space: graph",
            "log_base: 2",
            "threshold: 1",
            "dataset: four.csv",
            "objects: 4",
            "selected: 3",
            "edges: 4",
            "sample_edges: 1",
        ]
        assert body.splitlines() == ["a", "b", "d"]

    def test_empty_sample_is_header_only(self):
        g = build_graph([], nodes=["x", "y"])
        out = io.StringIO()
        write_sample(sample(g, SamplerConfig(log_base=2)), out)
        assert out.getvalue().endswith("selected: 0\nedges: 0\nsample_edges: 0\n\n")

    def test_point_sample_reads_back(self, three_points):
        ps = PointSet.from_rows(three_points)
        config = SamplerConfig(log_base=2, radius=50, step=10)
        result = sample(ps, config)
        out = io.BytesIO()
        write_sample(result, out)
        out.seek(0)
        parsed = read_sample(out)
        assert parsed.members == ("0", "1")
        assert parsed.coordinates == ((0.0, 0.0), (0.0, 40.0))
        assert parsed.config() == config
        assert parsed.header["radius"] == "50" and parsed.header["step"] == "10"

    def test_read_back_reproduces_the_sample(self, lesmis):
        config = SamplerConfig(log_base=3)
        result = sample(lesmis, config)
        out = io.StringIO()
        write_sample(result, out)
        parsed = read_sample(io.StringIO(out.getvalue()))
        assert sample(lesmis, parsed.config()).labels() == list(parsed.members)

    def test_fractional_numbers_round_trip(self, four_node_graph):
        out = io.StringIO()
        write_sample(sample(four_node_graph, SamplerConfig(log_base=1.8, threshold=0.75)), out)
        parsed = read_sample(io.StringIO(out.getvalue()))
        assert parsed.header["log_base"] == "1.8"
        assert parsed.config().threshold == 0.75

    def test_not_a_sample(self):
        with pytest.raises(InputError, match="not a sample file"):
            read_sample(text("format: other\n\n"))

    def test_bad_header_line(self):
        with pytest.raises(InputError, match="line 2"):
            read_sample(text("format: nn-sample/1\nbroken\n\n"))

    def test_incomplete_header(self):
        parsed = read_sample(text("format: nn-sample/1\nspace: graph\n\na\n"))
        with pytest.raises(ConfigurationError):
            parsed.config()

    def test_is_sample_file(self, tmp_path, four_node_graph):
        path = tmp_path / "s.sample"
        with atomic_output(path) as f:
            write_sample(sample(four_node_graph, SamplerConfig(log_base=2)), f)
        edges = tmp_path / "e.csv"
        edges.write_text("a,b,1\n")
        assert is_sample_file(path)
        assert not is_sample_file(edges)


class TestDistribution:
    def test_single_value(self):
        out = io.StringIO()
        write_distribution(CumulativeDistribution.from_values([5, 5, 5]), out)
        assert out.getvalue() == "value,cumulative_fraction\n5,1\n"

    def test_star(self):
        star = build_graph([("hub", "x", 1), ("hub", "y", 1), ("hub", "z", 1)])
        out = io.StringIO()
        write_distribution(cumulative_degree_distribution(star), out)
        assert out.getvalue().splitlines()[1:] == ["1,1", "3,0.25"]
        assert read_distribution(io.StringIO(out.getvalue())) == [(1.0, 1.0), (3.0, 0.25)]

    def test_missing_header(self):
        with pytest.raises(InputError, match="line 1"):
            read_distribution(text("1,1\n"))


class TestAtomicOutput:
    def test_success_replaces_target(self, tmp_path):
        target = tmp_path / "out" / "result.txt"
        with atomic_output(target) as f:
            f.write("done\n")
        assert target.read_text() == "done\n"
        assert [p.name for p in target.parent.iterdir()] == ["result.txt"]

    def test_failure_leaves_nothing(self, tmp_path):
        target = tmp_path / "result.txt"
        with pytest.raises(RuntimeError):
            with atomic_output(target) as f:
                f.write("partial")
                raise RuntimeError("interrupted")
        assert list(tmp_path.iterdir()) == []

    def test_failure_keeps_previous_file(self, tmp_path):
        target = tmp_path / "result.txt"
        target.write_text("old\n")
        with pytest.raises(RuntimeError):
            with atomic_output(target) as f:
                f.write("new")
                raise RuntimeError("interrupted")
        assert target.read_text() == "old\n"

    def test_binary(self, tmp_path):
        target = tmp_path / "raw.bin"
        with atomic_output(target, binary=True) as f:
            f.write(b"\x00\x01")
        assert target.read_bytes() == b"\x00\x01"


def test_load_bytes_checksum(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_bytes(b"")
    data, checksum = load_bytes(path)
    assert data == b""
    assert checksum == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
