"""
Building a burglary network from general statistics
====================================================

A knowledge base holds two statistics and one fact about a house.  We
ask about a single event, E002, in which Watson reports hearing the
alarm, and let the constructor decide which nodes and edges it needs.
"""

from importlib import resources

from kbmc import KnowledgeBase, build_network, eliminate, parse_request, to_text


def data(name):
    return resources.files("kbmc").joinpath("data", name).read_text()


kb = KnowledgeBase.from_text(data("holmes.kb"))

# How each sentence was classified
for c in kb.classified:
    print(f"@{c.label:3s} {c.kind}")

req = parse_request(data("holmes_e002.req"), kb.signature)
net, report = build_network(kb, req)

# The network, in the line-oriented .bn format
print()
print(to_text(net))

# Where each number came from
for e in report.entries:
    if e.state == "true":
        cfg = ", ".join(f"{p}={v}" for p, v in e.config)
        print(f"P({e.node}=true{' | ' + cfg if cfg else ''}) = {e.prob}   <- {e.how}")

print()
for w in report.warnings:
    print("warning:", w)

# Burglary has no prior statistic, so it got a uniform one, and the
# alarm has no statistic for the no-burglary case, so the leak is 0.
# With a zero leak, a report implies a burglary.
post = eliminate(net, ["Burglary(E002,MyHouse)"], {"ReportsAlarm(E002,Watson,MyHouse)": "true"})
print()
print("P(Burglary | Watson reports) =", post.prob(**{"Burglary(E002,MyHouse)": "true"}))
