"""Machine-readable pass/fail certificates for verified claims."""


class Certificate:
    def __init__(self, claim, status, witnesses=None, counterexample=None):
        self.claim = claim
        self.status = status
        self.witnesses = list(witnesses or [])
        self.counterexample = counterexample

    @property
    def passed(self):
        return self.status == "pass"

    @classmethod
    def passing(cls, claim, witnesses=None):
        return cls(claim, "pass", witnesses)

    @classmethod
    def failing(cls, claim, counterexample, witnesses=None):
        return cls(claim, "fail", witnesses, counterexample)

    def to_dict(self):
        out = {"claim": self.claim, "status": self.status, "witnesses": self.witnesses}
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out

    def __repr__(self):
        return "Certificate(%r, %s)" % (self.claim, self.status)
