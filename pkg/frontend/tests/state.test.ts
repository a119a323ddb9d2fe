import { describe, expect, it } from "vitest";

import {
  advance,
  back,
  buildDocument,
  effectiveEdges,
  ensureForms,
  entryFor,
  initialState,
  loadState,
  moveActivity,
  saveState,
  stepProblems,
  syncEntries,
  toggleActivity,
  type WizardState,
} from "../src/state.js";
import type { ActivitySchema, MetricDefinition } from "../src/types.js";

const RESPONSE_TIME: MetricDefinition = {
  metric_id: "end_to_end_response_time",
  display_name: "End-to-end response time",
  category: "slo",
  value_type: "numeric",
  unit: "seconds",
  range_min: 0,
  range_max: null,
  enum_values: null,
  allowed_operators: ["lt", "lte", "gt", "gte", "eq", "neq"],
};

const CONNECTIVITY: MetricDefinition = {
  metric_id: "network_connectivity",
  display_name: "Network connectivity",
  category: "slo",
  value_type: "percentage",
  unit: "percent",
  range_min: 0,
  range_max: 100,
  enum_values: null,
  allowed_operators: ["lt", "lte", "gt", "gte", "eq", "neq"],
};

const MECHANISM: MetricDefinition = {
  metric_id: "communication_mechanism",
  display_name: "Communication mechanism",
  category: "config",
  value_type: "enum",
  unit: "",
  range_min: null,
  range_max: null,
  enum_values: ["wifi", "bluetooth"],
  allowed_operators: ["eq", "neq"],
};

function schemaFor(
  name: string,
  layer: string,
  model: string | null,
  layerMetrics: MetricDefinition[] = [],
): ActivitySchema {
  return {
    name,
    deployment_layer: layer,
    programming_model: model,
    metrics: { activity: [], layer: layerMetrics, model: [] },
  };
}

function filledHeaderState(): WizardState {
  const state = initialState();
  state.header = {
    type: "Remote Health Monitoring",
    agreement_start: "2024-01-01T00:00:00Z",
    agreement_end: "2025-01-01T00:00:00Z",
  };
  return state;
}

describe("form entries", () => {
  it("defaults enum entries to the first allowed value and operator", () => {
    const entry = entryFor(MECHANISM);
    expect(entry.value).toBe("wifi");
    expect(entry.operator).toBe("eq");
    expect(entry.checked).toBe(false);
  });

  it("keeps user edits when syncing against a re-fetched metric list", () => {
    const edited = { ...entryFor(RESPONSE_TIME), checked: true, value: "60" };
    const synced = syncEntries([edited], [RESPONSE_TIME, CONNECTIVITY]);
    expect(synced[0]).toEqual(edited);
    expect(synced[1].metric_id).toBe("network_connectivity");
  });
});

describe("step gating", () => {
  it("blocks the first step until the header is complete", () => {
    const state = initialState();
    expect(advance(state)).toBe(false);
    expect(stepProblems(state).map((p) => p.field)).toContain("header.type");

    const filled = filledHeaderState();
    expect(advance(filled)).toBe(true);
    expect(filled.step).toBe("workflow_select");
  });

  it("does not advance past selection with zero activities", () => {
    const state = filledHeaderState();
    advance(state);
    expect(advance(state)).toBe(false);
    expect(state.step).toBe("workflow_select");
    expect(stepProblems(state)[0].field).toBe("workflow");
  });

  it("requires values for checked metrics before leaving the forms step", () => {
    const state = filledHeaderState();
    state.step = "activity_forms";
    state.selected = ["Capture Event of Interest (EoI)"];
    ensureForms(
      state,
      "Capture Event of Interest (EoI)",
      schemaFor("Capture Event of Interest (EoI)", "iot_device", null, [RESPONSE_TIME]),
    );
    state.forms["Capture Event of Interest (EoI)"].layer[0].checked = true;
    state.forms["Capture Event of Interest (EoI)"].layer[0].value = "";
    expect(advance(state)).toBe(false);
    state.forms["Capture Event of Interest (EoI)"].layer[0].value = "5";
    expect(advance(state)).toBe(true);
    back(state);
    expect(state.step).toBe("activity_forms");
  });
});

describe("workflow selection", () => {
  it("keeps selection order and supports reordering", () => {
    const state = initialState();
    toggleActivity(state, "A");
    toggleActivity(state, "B");
    toggleActivity(state, "C");
    expect(state.selected).toEqual(["A", "B", "C"]);
    moveActivity(state, "C", -1);
    expect(state.selected).toEqual(["A", "C", "B"]);
    toggleActivity(state, "A");
    expect(state.selected).toEqual(["C", "B"]);
  });

  it("derives chain edges from selection order", () => {
    const state = initialState();
    state.selected = ["A", "B", "C"];
    expect(effectiveEdges(state)).toEqual([
      { from: "n1", to: "n2" },
      { from: "n2", to: "n3" },
    ]);
  });

  it("uses explicit edges in advanced mode", () => {
    const state = initialState();
    state.selected = ["A", "B", "C"];
    state.advancedEdges = true;
    state.edges = [
      { from: "n1", to: "n2" },
      { from: "n1", to: "n3" },
    ];
    expect(effectiveEdges(state)).toEqual(state.edges);
  });
});

describe("document building", () => {
  it("assembles the demo walkthrough into the document shape", () => {
    const state = filledHeaderState();
    state.appSlos = syncEntries([], [RESPONSE_TIME]);
    state.appSlos[0].checked = true;
    state.appSlos[0].priority = "high";
    state.appSlos[0].operator = "lt";
    state.appSlos[0].value = "60";

    state.selected = ["Ingest data", "Real-time Analysis"];
    const ingest = schemaFor("Ingest data", "cloud", "ingestion", [CONNECTIVITY]);
    const analysis = schemaFor("Real-time Analysis", "cloud", "stream_processing");
    ensureForms(state, "Ingest data", ingest);
    ensureForms(state, "Real-time Analysis", analysis);
    state.forms["Ingest data"].layer[0].checked = true;
    state.forms["Ingest data"].layer[0].priority = "high";
    state.forms["Ingest data"].layer[0].operator = "eq";
    state.forms["Ingest data"].layer[0].value = "100";

    const doc = buildDocument(state, [RESPONSE_TIME], {
      "Ingest data": ingest,
      "Real-time Analysis": analysis,
    });

    expect(doc.slos).toEqual([
      {
        metric_id: "end_to_end_response_time",
        priority: "high",
        operator: "lt",
        value: 60,
        unit: "seconds",
      },
    ]);
    expect(doc.workflow.activities[0]).toEqual({
      id: "n1",
      name: "Ingest data",
      deployment_layer: {
        name: "cloud",
        constraints: [
          {
            metric_id: "network_connectivity",
            priority: "high",
            operator: "eq",
            value: 100,
            unit: "percent",
          },
        ],
      },
      programming_model: { name: "ingestion", constraints: [] },
      constraints: [],
    });
    expect(doc.workflow.activities[1].programming_model).toEqual({
      name: "stream_processing",
      constraints: [],
    });
    expect(doc.workflow.edges).toEqual([{ from: "n1", to: "n2" }]);
  });

  it("omits unchecked metrics entirely", () => {
    const state = filledHeaderState();
    state.appSlos = syncEntries([], [RESPONSE_TIME, CONNECTIVITY]);
    state.selected = ["Ingest data"];
    const schema = schemaFor("Ingest data", "cloud", null, [CONNECTIVITY, MECHANISM]);
    ensureForms(state, "Ingest data", schema);
    const doc = buildDocument(state, [RESPONSE_TIME, CONNECTIVITY], {
      "Ingest data": schema,
    });
    expect(doc.slos).toEqual([]);
    expect(doc.workflow.activities[0].deployment_layer.constraints).toEqual([]);
    expect(doc.workflow.activities[0].constraints).toEqual([]);
  });

  it("passes non-numeric input through for the validator to report", () => {
    const state = filledHeaderState();
    state.appSlos = syncEntries([], [RESPONSE_TIME]);
    state.appSlos[0].checked = true;
    state.appSlos[0].value = "sixty";
    const doc = buildDocument(state, [RESPONSE_TIME], {});
    expect(doc.slos[0].value).toBe("sixty");
  });
});

describe("persistence", () => {
  it("round-trips state through storage and rejects junk", () => {
    const bucket = new Map<string, string>();
    const storage = {
      getItem: (k: string) => bucket.get(k) ?? null,
      setItem: (k: string, v: string) => void bucket.set(k, v),
      removeItem: (k: string) => void bucket.delete(k),
    };
    const state = filledHeaderState();
    state.selected = ["Ingest data"];
    saveState(state, storage);
    expect(loadState(storage)).toEqual(state);

    bucket.set("sla-wizard-state-v1", "{broken");
    expect(loadState(storage)).toBeNull();
  });
});
