// Built-in corpus: alphabet, benign seed sessions per layer, attack-variant
// skeletons and their reference signatures. Everything is stored in the same
// text formats the loaders accept, so `phoenix catalog --dump` can write it
// out verbatim.

#include "corpus_data.hpp"

namespace phoenix::traces::data {

const char* const kAlphabet = R"(# message labels
rrcConnectionRequest
rrcConnectionSetup
rrcConnectionSetupComplete
rrcConnectionReject
rrcConnectionRelease
securityModeCommand
securityModeComplete
ueCapabilityEnquiry
ueCapabilityInformation
ueInformationRequest
rlfReport
rrcConnectionReconfiguration
rrcConnectionReconfigurationComplete
measurementReport
paging
attachRequest
attachAccept
attachComplete
attachReject
authenticationRequest
authenticationResponse
authenticationReject
nasSecurityModeCommand
nasSecurityModeComplete
identityRequest
identityResponse
emmInformation
serviceRequest
serviceReject
tauRequest
tauAccept
tauComplete
tauReject
detachRequest
%predicates
imsi
imei
measConfig
eea0
malformed
)";

const char* const kRrcSeeds = R"(# benign RRC sessions
@label benign
rrcConnectionRequest
rrcConnectionSetup
rrcConnectionSetupComplete
securityModeCommand
securityModeComplete
rrcConnectionReconfiguration measConfig=1
rrcConnectionReconfigurationComplete
measurementReport
rrcConnectionRelease

rrcConnectionRequest
rrcConnectionSetup
rrcConnectionSetupComplete
securityModeCommand
securityModeComplete
ueCapabilityEnquiry
ueCapabilityInformation
rrcConnectionReconfiguration
rrcConnectionReconfigurationComplete
rrcConnectionRelease

rrcConnectionRequest
rrcConnectionSetup
rrcConnectionSetupComplete
securityModeCommand
securityModeComplete
ueInformationRequest
rlfReport
rrcConnectionRelease

rrcConnectionRequest
rrcConnectionSetup
rrcConnectionSetupComplete
ueCapabilityEnquiry
ueCapabilityInformation
securityModeCommand
securityModeComplete
ueInformationRequest
rlfReport
rrcConnectionRelease

rrcConnectionRequest
rrcConnectionReject
paging

rrcConnectionRequest
rrcConnectionSetup
rrcConnectionSetupComplete
identityRequest
identityResponse
securityModeCommand
securityModeComplete
rrcConnectionReconfiguration
rrcConnectionReconfigurationComplete
rrcConnectionRelease
paging

rrcConnectionRequest
rrcConnectionSetup
rrcConnectionSetupComplete
rrcConnectionRelease

rrcConnectionRequest
rrcConnectionSetup
rrcConnectionSetupComplete
securityModeCommand
securityModeComplete
rrcConnectionReconfiguration measConfig=1
rrcConnectionReconfigurationComplete
measurementReport
measurementReport
ueInformationRequest
rlfReport
rrcConnectionRelease
paging

rrcConnectionRequest
rrcConnectionSetup
rrcConnectionSetupComplete
securityModeCommand
securityModeComplete
rrcConnectionRelease
paging

rrcConnectionRequest
rrcConnectionSetup
rrcConnectionSetupComplete
securityModeCommand
securityModeComplete
ueCapabilityEnquiry
ueCapabilityInformation
ueInformationRequest
rlfReport
rrcConnectionRelease
)";

const char* const kNasSeeds = R"(# benign NAS sessions
@label benign
attachRequest
authenticationRequest
authenticationResponse
nasSecurityModeCommand
nasSecurityModeComplete
attachAccept
attachComplete
emmInformation

attachRequest
authenticationRequest
authenticationResponse
nasSecurityModeCommand
nasSecurityModeComplete
identityRequest imei=1
identityResponse
attachAccept
attachComplete

serviceRequest
authenticationRequest
authenticationResponse
nasSecurityModeCommand
nasSecurityModeComplete

serviceRequest

tauRequest
tauAccept
tauComplete

tauRequest
authenticationRequest
authenticationResponse
nasSecurityModeCommand
nasSecurityModeComplete
tauAccept
tauComplete
emmInformation

attachRequest
authenticationRequest
authenticationResponse
nasSecurityModeCommand
nasSecurityModeComplete
attachReject

serviceRequest
authenticationRequest
authenticationResponse
nasSecurityModeCommand
nasSecurityModeComplete
serviceReject

tauRequest
authenticationRequest
authenticationResponse
nasSecurityModeCommand
nasSecurityModeComplete
tauReject

attachRequest
authenticationRequest
authenticationResponse
nasSecurityModeCommand
nasSecurityModeComplete
attachAccept
attachComplete
detachRequest
)";

const std::vector<CatalogText>& catalog() {
  static const std::vector<CatalogText> entries = {
      {"rlf_report", R"(@label attack rlf_report
rrcConnectionRequest
rrcConnectionSetup
rrcConnectionSetupComplete
ueInformationRequest
rlfReport

rrcConnectionRequest
rrcConnectionSetup
rrcConnectionSetupComplete
identityRequest
identityResponse
ueInformationRequest
rlfReport

rrcConnectionRequest
rrcConnectionSetup
rrcConnectionSetupComplete
ueCapabilityEnquiry
ueCapabilityInformation
ueInformationRequest
rlfReport

rrcConnectionRequest
rrcConnectionSetup
rrcConnectionSetupComplete
identityRequest
identityResponse
ueCapabilityEnquiry
ueCapabilityInformation
ueInformationRequest
rlfReport
)",
       "(imp (prop ueInformationRequest) (S (not (prop rrcConnectionRequest)) (prop securityModeComplete)))"},
      {"measurement_report", R"(@label attack measurement_report
rrcConnectionRequest
rrcConnectionSetup
rrcConnectionSetupComplete
rrcConnectionReconfiguration measConfig=1
measurementReport

rrcConnectionRequest
rrcConnectionSetup
rrcConnectionSetupComplete
ueCapabilityEnquiry
ueCapabilityInformation
rrcConnectionReconfiguration measConfig=1
measurementReport

rrcConnectionRequest
rrcConnectionSetup
rrcConnectionSetupComplete
identityRequest
identityResponse
rrcConnectionReconfiguration measConfig=1
measurementReport
measurementReport
)",
       "(imp (and (prop rrcConnectionReconfiguration) (prop measConfig)) "
       "(S (not (prop rrcConnectionRequest)) (prop securityModeComplete)))"},
      {"aka_bypass", R"(@label attack aka_bypass
rrcConnectionRequest
rrcConnectionSetup
rrcConnectionSetupComplete
rrcConnectionReconfiguration
rrcConnectionReconfigurationComplete

rrcConnectionRequest
rrcConnectionSetup
rrcConnectionSetupComplete
ueCapabilityEnquiry
ueCapabilityInformation
rrcConnectionReconfiguration
rrcConnectionReconfigurationComplete
rrcConnectionRelease
)",
       "(imp (and (prop rrcConnectionReconfiguration) (not (prop measConfig))) "
       "(S (not (prop rrcConnectionRequest)) (prop securityModeComplete)))"},
      {"paging_with_imsi", R"(@label attack paging_with_imsi
rrcConnectionRequest
rrcConnectionSetup
rrcConnectionSetupComplete
rrcConnectionRelease
paging imsi=1

rrcConnectionRequest
rrcConnectionReject
paging imsi=1
)",
       "(not (and (prop paging) (prop imsi)))"},
      {"imsi_cracking", R"(@label attack imsi_cracking
rrcConnectionRequest
rrcConnectionSetup
rrcConnectionSetupComplete
securityModeCommand
securityModeComplete
rrcConnectionRelease
paging
paging

rrcConnectionRequest
rrcConnectionReject
paging
paging
paging
)",
       "(not (and (prop paging) (Y (prop paging))))"},
      {"imsi_catching", R"(@label attack imsi_catching
attachRequest
identityRequest imsi=1
identityResponse
authenticationRequest
authenticationResponse
nasSecurityModeCommand
nasSecurityModeComplete
attachAccept
attachComplete

attachRequest
identityRequest imsi=1
identityResponse
)",
       "(imp (and (prop identityRequest) (prop imsi)) "
       "(S (not (or (prop attachRequest) (or (prop serviceRequest) (prop tauRequest)))) "
       "(prop nasSecurityModeComplete)))"},
      {"imei_catching", R"(@label attack imei_catching
attachRequest
identityRequest imei=1
identityResponse
authenticationRequest
authenticationResponse
nasSecurityModeCommand
nasSecurityModeComplete
attachAccept
attachComplete

attachRequest
identityRequest imei=1
identityResponse
)",
       "(imp (and (prop identityRequest) (prop imei)) "
       "(S (not (or (prop attachRequest) (or (prop serviceRequest) (prop tauRequest)))) "
       "(prop nasSecurityModeComplete)))"},
      {"malformed_identity_request", R"(@label attack malformed_identity_request
attachRequest
identityRequest malformed=1
identityResponse

attachRequest
authenticationRequest
authenticationResponse
nasSecurityModeCommand
nasSecurityModeComplete
identityRequest malformed=1
identityResponse
)",
       "(not (and (prop identityRequest) (prop malformed)))"},
      {"null_encryption", R"(@label attack null_encryption
attachRequest
authenticationRequest
authenticationResponse
nasSecurityModeCommand eea0=1
nasSecurityModeComplete
attachAccept
attachComplete

serviceRequest
authenticationRequest
authenticationResponse
nasSecurityModeCommand eea0=1
nasSecurityModeComplete

tauRequest
authenticationRequest
authenticationResponse
nasSecurityModeCommand eea0=1
nasSecurityModeComplete
tauAccept
tauComplete
)",
       "(not (and (prop nasSecurityModeCommand) (prop eea0)))"},
      {"emm_information", R"(@label attack emm_information
attachRequest
emmInformation

attachRequest
authenticationRequest
authenticationResponse
emmInformation

tauRequest
emmInformation
)",
       "(imp (prop emmInformation) "
       "(S (not (or (prop attachRequest) (or (prop serviceRequest) (prop tauRequest)))) "
       "(prop nasSecurityModeComplete)))"},
      {"numb", R"(@label attack numb
attachRequest
authenticationReject

serviceRequest
authenticationReject
)",
       "(not (prop authenticationReject))"},
      {"attach_reject", R"(@label attack attach_reject
attachRequest
attachReject

attachRequest
identityRequest
identityResponse
attachReject
)",
       "(imp (prop attachReject) "
       "(S (not (or (prop attachRequest) (or (prop serviceRequest) (prop tauRequest)))) "
       "(prop nasSecurityModeComplete)))"},
      {"tau_reject", R"(@label attack tau_reject
tauRequest
tauReject

tauRequest
authenticationRequest
authenticationResponse
tauReject
)",
       "(imp (prop tauReject) "
       "(S (not (or (prop attachRequest) (or (prop serviceRequest) (prop tauRequest)))) "
       "(prop nasSecurityModeComplete)))"},
      {"service_reject", R"(@label attack service_reject
serviceRequest
serviceReject

serviceRequest
authenticationRequest
authenticationResponse
serviceReject
)",
       "(imp (prop serviceReject) "
       "(S (not (or (prop attachRequest) (or (prop serviceRequest) (prop tauRequest)))) "
       "(prop nasSecurityModeComplete)))"},
  };
  return entries;
}

}  // namespace phoenix::traces::data
