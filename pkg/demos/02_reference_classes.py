"""
Choosing between statistics by specificity
==========================================

Neighbours report alarms at one rate, but Watson has a statistic of
his own for false alarms.  The same knowledge base gives different
report CPTs for Watson and for Gibbons.
"""

from importlib import resources

from kbmc import KnowledgeBase, build_network, parse_request


def data(name):
    return resources.files("kbmc").joinpath("data", name).read_text()


def show(kb, req_file):
    req = parse_request(data(req_file), kb.signature)
    net, report = build_network(kb, req)
    print(f"-- event {req.event}: nodes {', '.join(net.names)}")
    for e in report.entries:
        if e.state == "true":
            cfg = ", ".join(f"{p}={v}" for p, v in e.config)
            print(f"   P({e.node}=true{' | ' + cfg if cfg else ''}) = {e.prob}  ({e.how})")
    print()


kb = KnowledgeBase.from_text(data("example2.kb"))
show(kb, "watson_e002.req")
show(kb, "gibbons_e004.req")

# A monitoring company whose reports bear on burglary directly.  The
# report becomes the parent of burglary and the alarm node disappears.
kb3 = KnowledgeBase.from_text(data("example3.kb"))
show(kb3, "monitor_e003.req")

# Two statistics that are both more specific than the general one but
# not comparable with each other, and that disagree: construction stops.
from kbmc.construct import UnresolvedConflict

extra = """
pred Raining(Event); pred Nighttime(Event);
@rain: stat [ReportsAlarm(e, y, x) | AlarmSound(e, x) & HouseWithAlarm(x) & LivesNear(x, y) & Raining(e)]_{e, x, y} = 0.3.
@night: stat [ReportsAlarm(e, y, x) | AlarmSound(e, x) & HouseWithAlarm(x) & LivesNear(x, y) & Nighttime(e)]_{e, x, y} = 0.6.
"""
kb4 = KnowledgeBase.from_text(data("example2.kb") + extra)
req = parse_request("event E005; evidence ReportsAlarm(E005, Gibbons, MyHouse), Raining(E005), "
                    "Nighttime(E005); query AlarmSound(E005, MyHouse);", kb4.signature)
try:
    build_network(kb4, req)
except UnresolvedConflict as exc:
    print("conflict:", exc)
    print("labels:", exc.labels)
