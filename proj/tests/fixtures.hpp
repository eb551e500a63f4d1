// Golden fixtures: the shipping/receiving event pair and its published
// sanitised digests. The SSCC carries ten serial digits ("0222222222"); the
// nine-digit variant that appears once in prose hashes to a different value
// and is a transcription slip. The party digests reproduce only when salted
// with the shared PO reference, the transaction digest only when unsalted.
#pragma once

#include <string>

namespace fixtures {

inline const std::string kShippingXml = R"(<ObjectEvent>
  <eventTime>2021-04-28T00:00:00.000+02:00</eventTime>
  <eventTimeZoneOffset>+02:00</eventTimeZoneOffset>
  <epcList>
    <epc>urn:epc:id:sscc:4023333.0222222222</epc>
  </epcList>
  <action>OBSERVE</action>
  <bizStep>urn:epcglobal:cbv:bizstep:shipping</bizStep>
  <disposition>urn:epcglobal:cbv:disp:in_transit</disposition>
  <readPoint>
    <id>urn:epc:id:sgln:4023333.00002.0</id>
  </readPoint>
  <bizTransactionList>
    <bizTransaction type="urn:epcglobal:cbv:btt:po">
      urn:epc:id:gdti:0614141.00002.PO-123
    </bizTransaction>
  </bizTransactionList>
  <extension>
    <sourceList>
      <source type="urn:epcglobal:cbv:sdt:possessing_party">
        urn:epc:id:pgln:4023333.00000
      </source>
    </sourceList>
    <destinationList>
      <destination type="urn:epcglobal:cbv:sdt:possessing_party">
        urn:epc:id:pgln:0614141.00000
      </destination>
    </destinationList>
  </extension>
</ObjectEvent>
)";

inline const std::string kReceivingXml = R"(<ObjectEvent>
  <eventTime>2021-04-29T00:00:00.000+02:00</eventTime>
  <eventTimeZoneOffset>+02:00</eventTimeZoneOffset>
  <epcList>
    <epc>urn:epc:id:sscc:4023333.0222222222</epc>
  </epcList>
  <action>OBSERVE</action>
  <bizStep>urn:epcglobal:cbv:bizstep:receiving</bizStep>
  <disposition>urn:epcglobal:cbv:disp:in_progress</disposition>
  <readPoint>
    <id>urn:epc:id:sgln:0614141.00012.0</id>
  </readPoint>
  <bizTransactionList>
    <bizTransaction type="urn:epcglobal:cbv:btt:po">
      urn:epc:id:gdti:0614141.00002.PO-123
    </bizTransaction>
  </bizTransactionList>
  <extension>
    <sourceList>
      <source type="urn:epcglobal:cbv:sdt:possessing_party">
        urn:epc:id:pgln:4023333.00000
      </source>
    </sourceList>
    <destinationList>
      <destination type="urn:epcglobal:cbv:sdt:possessing_party">
        urn:epc:id:pgln:0614141.00000
      </destination>
    </destinationList>
  </extension>
</ObjectEvent>
)";

// sha256("urn:epc:id:sscc:4023333.0222222222")
inline const std::string kSsccDigest =
    "e5284a01b67b7756c0f51d10e7c74c6f277fea0e1f08ebe8f27fae25b04e695b";

// sha256(party ++ "urn:epc:id:gdti:0614141.00002.PO-123")
inline const std::string kSourcePartyDigest =
    "63ba4ead93f79fb67e68a277e85247988fb410ac0c2f00b87f802d75031b52f9";
inline const std::string kDestPartyDigest =
    "8d2cdc63d2e3d173174c9167ac4a857dfc0a0abba7cee54ef0e4b9a21156021b";

// sha256("urn:epc:id:gdti:0614141.00002.PO-123"), unsalted
inline const std::string kTransactionDigest =
    "2428dd1fddb2811d950320b732dda8f4be7312e02be14c2dfb8da9969085da38";

inline const std::string kSsccEpc = "urn:epc:id:sscc:4023333.0222222222";
inline const std::string kPoValue = "urn:epc:id:gdti:0614141.00002.PO-123";
inline const std::string kSourceParty = "urn:epc:id:pgln:4023333.00000";
inline const std::string kDestParty = "urn:epc:id:pgln:0614141.00000";

// Worked access-request example, verbatim field values.
inline const std::string kAccessRequestJson = R"({
  "requesting": "dd85a8a245177fe4c4cbd540075a96dc38aefd7780677989be9e1efc92b5f08f",
  "recipient": {
    "endpoint": "https://eccc.de:234567",
    "protocol": "POST"
  },
  "auth": {
    "id": "Sebastian"
  },
  "valid_until": "2021-07-30 13:32:44"
})";

inline const std::string kAccessRequestDigest =
    "dd85a8a245177fe4c4cbd540075a96dc38aefd7780677989be9e1efc92b5f08f";

} // namespace fixtures
