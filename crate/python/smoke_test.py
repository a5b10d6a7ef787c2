"""Smoke test for the proxi extension module."""
import json
import tempfile
from pathlib import Path

import proxi


def main():
    net = proxi.Network.from_strings("1\t2\n2\t3\n1\t4\n", "1\tm1\t1\n2\tm1\t2\n3\tm1\t3\n1\tm2\t5\n4\tm2\t9\n")
    assert net.rank_influencers(2) == [(1, 3), (2, 1)], net.rank_influencers(2)
    assert sorted(net.followups(1)) == [("m1", 2), ("m1", 3), ("m2", 4)]

    index = proxi.PredicateIndex.from_postings(
        4,
        [("action", "genre", "drama", [0, 1, 2]), ("user", "gender", "female", [2, 3])],
    )
    greedy = index.mine(2, 1)
    assert greedy.total_coverage == 4 and greedy.relative_coverage == 1.0, greedy
    oracle = index.run("oracle", 1, 1)
    assert oracle.total_coverage == 3
    assert json.loads(greedy.to_json())["total_coverage"] == 4

    try:
        index.run("lazy", 1, 1)
    except proxi.ProxiError:
        pass
    else:
        raise AssertionError("unknown algorithm accepted")

    data = proxi.Dataset.synthetic(users=200, actions=80, seed=3)
    top = data.rank_influencers(3)
    sub = data.index(top[0][0])
    result = sub.mine(3, 2)
    assert 0.0 <= result.relative_coverage <= 1.0
    report = json.loads(sub.report(result))
    assert report["influencer"] == top[0][0]
    assert report["total_coverage"] == result.total_coverage
    table = proxi.render_table(sub.report(result), {"genre": ""})
    assert "Total Coverage:" in table, table

    with tempfile.TemporaryDirectory() as tmp:
        files = proxi.generate_synthetic(users=200, actions=80, seed=3, out=tmp)
        d = Path(tmp)
        rows = proxi.run_pipeline(
            str(d / "graph.tsv"), str(d / "actions.tsv"), str(d / "out"),
            user_attrs=str(d / "users.attrs.tsv"), action_attrs=str(d / "actions.attrs.tsv"),
            k=3, l=2, top_n=3,
        )
        assert len(rows) == 3 and rows[0][1] == top[0][0], rows
        assert (d / "out" / "summary.csv").exists()
        assert set(files) == {"graph.tsv", "actions.tsv", "users.attrs.tsv", "actions.attrs.tsv"}

    print("smoke test ok:", result)


if __name__ == "__main__":
    main()
