use dirflow_py::dirflow_py;
use pyo3::prelude::*;

const SCRIPT: &std::ffi::CStr = c"
from fractions import Fraction
import dirflow_py as d

mu = d.Distance(['s', 't'], [[0, Fraction(3, 2)], [0, 0]])
assert mu.value('s', 't') == Fraction(3, 2)
assert mu.is_metric()
assert d.Distance.from_dict(mu.to_dict()) == mu

net = d.Network(['s', 'x', 't'], ['s', 't'], [('s', 'x', 2), ('x', 't', 1)])
assert net.min_cut(['s'], ['t']) == (1, ['s', 'x'])
r = d.solve(mu, net)
assert r['method'] == 'mcc'
assert Fraction(r['value']['num'], r['value']['den']) == Fraction(3, 2)

report = d.Distance.all_one(['a', 'b', 'c']).classify()
assert len(report['oriented_tree_realization']['nodes']) == 4

tri = d.Network(['a', 'b', 'c'], ['a', 'b', 'c'], [('a', 'b', 1)])
try:
    d.solve(d.Distance.all_one(['a', 'b', 'c']), tri, 'mcc')
    raise AssertionError('expected HypothesisError')
except d.HypothesisError:
    pass

g, w = d.generate(3, weight='all_one', eulerian='inner')
assert d.solve(w, g, 'lp')['value'] == d.solve(w, g, 'tree')['value']

lock_net = d.Network(['s', 't', 'u', 'x'], ['s', 't', 'u'],
    [('s', 'x', 2), ('x', 't', 1), ('x', 'u', 1), ('t', 's', 1), ('u', 's', 1)])
fam = [{'A': ['s'], 'B': ['t', 'u']}, {'A': ['s', 't'], 'B': ['u']}]
assert d.verify(lock_net, fam, d.lock(lock_net, fam)['multiflow'])
";

#[test]
fn python_api_round_trip() {
    pyo3::append_to_inittab!(dirflow_py);
    Python::attach(|py| py.run(SCRIPT, None, None)).unwrap();
}
